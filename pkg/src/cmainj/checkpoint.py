"""State checkpoint serialization.

Flat self-describing text record: a leading magic/version line, then one
``key value...`` line per field of (n, t, sigma, m, p_sigma, p_c, the
lower triangle of C, stream position).  Floats are written with %.17g so
they round-trip exactly.  Strategy parameters and behavioral switches are
not part of the record; supply them again when resuming.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .rng import GaussianStream

MAGIC = "CMAINJ1"


def _fmt(values) -> str:
    return " ".join("%.17g" % v for v in np.atleast_1d(values))


def save_checkpoint(path, state, stream: GaussianStream) -> None:
    n = state.n
    tril = state.C[np.tril_indices(n)]
    lines = [
        MAGIC,
        f"n {n}",
        f"t {state.t}",
        f"sigma {_fmt(state.sigma)}",
        f"m {_fmt(state.m)}",
        f"p_sigma {_fmt(state.p_sigma)}",
        f"p_c {_fmt(state.p_c)}",
        f"C_lower {_fmt(tril)}",
        "rng " + " ".join(str(v) for v in stream.get_state()),
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path) -> tuple[dict, GaussianStream]:
    """Parse a checkpoint into a raw field dict plus the restored stream.

    The dict holds n, t, sigma, m, p_sigma, p_c, and the full symmetric C
    rebuilt from its lower triangle.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh.read().splitlines() if ln.strip()]
    if not lines or lines[0] != MAGIC:
        raise ConfigError(f"not a {MAGIC} checkpoint: {path}")
    fields: dict[str, str] = {}
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        fields[key] = rest
    try:
        n = int(fields["n"])
        t = int(fields["t"])
        sigma = float(fields["sigma"])
        m = np.fromstring(fields["m"], sep=" ")
        p_sigma = np.fromstring(fields["p_sigma"], sep=" ")
        p_c = np.fromstring(fields["p_c"], sep=" ")
        tril = np.fromstring(fields["C_lower"], sep=" ")
        rng_state = tuple(int(v) for v in fields["rng"].split())
    except KeyError as exc:
        raise ConfigError(f"checkpoint missing field {exc}") from exc
    if m.size != n or p_sigma.size != n or p_c.size != n:
        raise ConfigError("checkpoint vector lengths do not match n")
    if tril.size != n * (n + 1) // 2:
        raise ConfigError("checkpoint C_lower has wrong length")
    c = np.zeros((n, n))
    c[np.tril_indices(n)] = tril
    c = c + np.tril(c, -1).T
    stream = GaussianStream.from_state(rng_state)
    return (
        {"n": n, "t": t, "sigma": sigma, "m": m, "p_sigma": p_sigma, "p_c": p_c, "C": c},
        stream,
    )
