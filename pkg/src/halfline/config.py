"""Job configuration: JSON schema, validation, and defaults.

A job config is a UTF-8 JSON object:

    {
      "bc":        {...},            # required; see halfline.bc JSON forms
      "potential": {"n": ..., "pieces": [...]},   # optional; default V = 0
      "kgrid":     [k_min, k_max, steps],         # required for sweeps
      "a_choice":  "auto" | number,               # matching point
      "outputs":   [{"csv": "path"} | {"json": "path"}, ...],
      "tolerances": {"abs_tol": r, "rel_tol": r, "max_step": r,
                     "method": "analytic" | "rk45"}
    }

Unknown keys are rejected with the offending field path.  Sweep grids must
start at k_min > 0: the zero-energy point is served by the dedicated
zero-energy command, not by grid evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .bc import BCPair, bc_from_json
from .errors import ValidationError
from .solver import Potential, SolverConfig, free_potential, potential_from_json

__all__ = ["JobConfig", "parse_config"]

_TOP_KEYS = {"bc", "potential", "kgrid", "a_choice", "outputs", "tolerances"}
_TOL_KEYS = {"abs_tol", "rel_tol", "max_step", "method"}


@dataclass(frozen=True)
class JobConfig:
    """Validated job description shared by all commands."""

    bc: BCPair
    potential: Potential
    kgrid: Optional[Tuple[float, float, int]] = None
    a_choice: object = "auto"
    outputs: Tuple[dict, ...] = field(default_factory=tuple)
    solver: SolverConfig = field(default_factory=SolverConfig)

    def resolve_a(self) -> float:
        if self.a_choice == "auto":
            return self.potential.x_max
        return float(self.a_choice)

    def kvalues(self):
        if self.kgrid is None:
            raise ValidationError("this command needs a 'kgrid' entry")
        k_min, k_max, steps = self.kgrid
        if steps == 1:
            return [k_min]
        return [k_min + (k_max - k_min) * i / (steps - 1) for i in range(steps)]


def parse_config(text) -> JobConfig:
    """Parse and validate a job config from bytes or str."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValidationError(f"config is not UTF-8: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config: expected a JSON object")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ValidationError(f"config: unknown keys {sorted(extra)}")
    if "bc" not in data:
        raise ValidationError("config.bc: required")
    bc = bc_from_json(data["bc"], "config.bc")

    if "potential" in data:
        pot = potential_from_json(data["potential"], "config.potential")
        if pot.n != bc.n:
            raise ValidationError(
                f"config: potential size {pot.n} does not match bc size {bc.n}"
            )
    else:
        pot = free_potential(bc.n)

    kgrid = None
    if "kgrid" in data:
        raw = data["kgrid"]
        if (not isinstance(raw, (list, tuple))) or len(raw) != 3:
            raise ValidationError("config.kgrid: expected [k_min, k_max, steps]")
        try:
            k_min, k_max = float(raw[0]), float(raw[1])
        except (TypeError, ValueError) as exc:
            raise ValidationError("config.kgrid: k_min/k_max must be numbers") from exc
        steps = raw[2]
        if not isinstance(steps, int) or steps < 1:
            raise ValidationError("config.kgrid: steps must be an integer >= 1")
        if k_min <= 0.0:
            raise ValidationError(
                "config.kgrid: k_min must be > 0 (k = 0 is served by the "
                "zero-energy command)"
            )
        if k_max < k_min:
            raise ValidationError("config.kgrid: k_max must be >= k_min")
        kgrid = (k_min, k_max, steps)

    a_choice = data.get("a_choice", "auto")
    if a_choice != "auto":
        try:
            a_choice = float(a_choice)
        except (TypeError, ValueError) as exc:
            raise ValidationError("config.a_choice: 'auto' or a number") from exc
        if a_choice < 0:
            raise ValidationError("config.a_choice: must be >= 0")

    outputs = []
    for i, sink in enumerate(data.get("outputs", [])):
        if not isinstance(sink, dict) or len(sink) != 1 or not (
            set(sink) <= {"csv", "json"}
        ):
            raise ValidationError(
                f"config.outputs[{i}]: expected {{'csv': path}} or {{'json': path}}"
            )
        outputs.append(dict(sink))

    tol = data.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ValidationError("config.tolerances: expected an object")
    extra = set(tol) - _TOL_KEYS
    if extra:
        raise ValidationError(f"config.tolerances: unknown keys {sorted(extra)}")
    try:
        solver = SolverConfig(
            abs_tol=float(tol.get("abs_tol", 1e-12)),
            rel_tol=float(tol.get("rel_tol", 1e-10)),
            max_step=float(tol.get("max_step", 0.1)),
            a_choice=a_choice,
            method=tol.get("method", "analytic"),
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"config.tolerances: {exc}") from exc

    return JobConfig(
        bc=bc, potential=pot, kgrid=kgrid, a_choice=a_choice,
        outputs=tuple(outputs), solver=solver,
    )
