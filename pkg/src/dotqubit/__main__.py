from dotqubit.cli import main

main()
