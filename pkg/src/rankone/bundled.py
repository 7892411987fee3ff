"""Named example specs, resolvable from the CLI.

    modular           PSL(2,Z) in SO(2,1), exact integer entries up to halves
    cyclic[:t]        <a_t> in SO(2,1) (t defaults to 1)
    schottky[:T[:n]]  <a^n, b^n> for the pair schottky_pair(T) (defaults T = 1.5, n = 2)

Anything else is read as a JSON spec (inline or a file path).
"""
from __future__ import annotations

from rankone.orbits import DiscreteGroupSpec, cyclic_spec, load_spec, modular_spec
from rankone.pingpong import pingpong_powers, schottky_pair

BUNDLED_SPECS = ("modular", "cyclic", "schottky")


def schottky_spec(T: float = 1.5, n: int = 2, seed: int = 0) -> DiscreteGroupSpec:
    a, b = schottky_pair(T)
    return pingpong_powers(a, b, n, seed=seed)


def resolve_spec(name: str, seed: int = 0) -> DiscreteGroupSpec:
    """Bundled spec by name (with optional ':'-separated parameters) or a JSON spec."""
    head, *args = str(name).strip().split(":")
    if head == "modular" and not args:
        return modular_spec()
    if head == "cyclic" and len(args) <= 1:
        return cyclic_spec(float(args[0]) if args else 1.0)
    if head == "schottky" and len(args) <= 2:
        T = float(args[0]) if args else 1.5
        n = int(args[1]) if len(args) > 1 else 2
        return schottky_spec(T, n, seed)
    return load_spec(name)
