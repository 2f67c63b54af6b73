"""
Numerical tolerances shared by every module.

All values are relative to the geometric scale of the pair unless noted.
"""

from dataclasses import dataclass, fields, replace as _dc_replace

from .errors import ConfigError

MIN_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Tolerances:
    # Degenerate triangle when 2A < tol_geom * (longest edge)^2.
    tol_geom: float = 1e-12
    # Vertex match distance, relative to the mean edge length.
    tol_touch: float = 1e-12
    # Parallel planes when |1 - |n_x . n_y|| < tol_parallel.
    tol_parallel: float = 1e-12
    # Gram-Schmidt: u_k is zero when |u_k|^2 <= rank_tol * max |a_i|^2.
    rank_tol: float = 1e-24
    # Gap h is zero when h <= zero_tol * scale.
    zero_tol: float = 1e-10
    # Faces whose weight is below this (absolute, weights are dimensionless) are skipped.
    prune_tol: float = 1e-14
    # Below P < small_p_ratio * gap scale the PBF comes from its defining integral.
    small_p_ratio: float = 0.2
    small_p_nodes: int = 12
    # Level-1 closed forms magnifying round-off by more than this use the defining integral.
    max_gap_amplification: float = 16.0
    # Floor applied to log arguments.
    log_floor: float = 1e-300

    def replace(self, **overrides):
        known = {f.name for f in fields(self)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"Unknown tolerance(s): {', '.join(unknown)}")
        for name, value in overrides.items():
            if name == "small_p_nodes":
                if int(value) < 2:
                    raise ConfigError("small_p_nodes must be >= 2")
            elif name == "zero_tol" and not float(value) >= MIN_ZERO_TOL:
                # round-off gaps of separated pairs reach ~1e-13 of the scale
                raise ConfigError(f"zero_tol must be >= {MIN_ZERO_TOL:g}, got {value!r}")
            elif name == "max_gap_amplification" and not float(value) >= 1.0:
                raise ConfigError(f"max_gap_amplification must be >= 1, got {value!r}")
            elif not float(value) >= 0.0:
                raise ConfigError(f"Tolerance {name} must be a non-negative number, got {value!r}")
        return _dc_replace(self, **overrides)


DEFAULT_TOLERANCES = Tolerances()


def resolve(tolerances):
    """Return `tolerances`, or the defaults when None."""
    return DEFAULT_TOLERANCES if tolerances is None else tolerances
