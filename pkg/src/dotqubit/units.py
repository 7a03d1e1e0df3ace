"""Unit bookkeeping.

Energies are in meV and times in ns inside the simulators; the coherence
budget works in Hz and seconds. Every energy/frequency conversion goes through
the functions below so a mixed-unit estimate can always be audited.
"""

import math

from dotqubit.errors import ValidationError

#: Reduced Planck constant in meV·ns (CODATA 2018).
HBAR_MEV_NS = 6.582119569e-4
#: Planck constant in meV·s (CODATA 2018).
H_MEV_S = 4.135667696e-12

NS_PER_S = 1e9


def mev_to_hz(energy_mev):
    """Plain frequency f = E/h of an energy in meV."""
    return energy_mev / H_MEV_S


def hz_to_mev(freq_hz):
    """Energy E = h f of a plain frequency in Hz."""
    return freq_hz * H_MEV_S


def mev_to_rad_per_ns(energy_mev):
    return energy_mev / HBAR_MEV_NS


def seconds_to_ns(t_s):
    return t_s * NS_PER_S


def ns_to_seconds(t_ns):
    return t_ns / NS_PER_S


def per_second_to_per_ns(rate):
    return rate / NS_PER_S


def frequency_for_convention(freq_hz, convention):
    """Rate entering ``tau = pi / rate`` for a plain frequency ``freq_hz``.

    ``"plain-frequency"`` uses f itself; ``"angular"`` uses 2*pi*f.
    """
    if convention == "plain-frequency":
        return freq_hz
    if convention == "angular":
        return 2.0 * math.pi * freq_hz
    raise ValidationError(f"unknown frequency convention {convention!r}")
