"""Named simulation scenarios and their flat key=value file format.

A scenario bundles model parameters, the initial state, a control law, the
integrator settings, and the campaign reporting window.  Three builtins
cover the bundled case studies: a measles outbreak in a city-sized
population and an influenza outbreak in a boarding school with immunity
waning over 7 or 15 days.

The file format is one `key = value` pair per line, keys carrying explicit
units (mu_per_day, horizon_days, ...), with # comments and blank lines
ignored.  Parsing is strict: unknown keys, bad numbers, and missing
required keys all raise ParseError naming the line and field.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

from .control import LAW1, LAW2, LAW_NONE, ControlLaw, law1, law2, no_vaccination
from .integrator import IntegrationConfig, validate_config
from .model import ModelParams, State, check_admissibility, validate_params


class ScenarioError(ValueError):
    """Invalid scenario request."""


class ParseError(ScenarioError):
    """Scenario file could not be parsed; message carries line and field."""


class UnknownBuiltin(ScenarioError):
    """Scenario name is neither a readable file nor a builtin."""


OUTPUT_KINDS = ("csv", "svg", "summary")


@dataclass(frozen=True)
class Scenario:
    """A fully specified run: who, how long, under which vaccination law."""

    name: str
    params: ModelParams
    initial: State
    law: ControlLaw
    integration: IntegrationConfig
    window: float
    week_length: float = 7.0
    outputs: tuple[str, ...] = ("csv", "summary")


def builtin_names() -> tuple[str, ...]:
    return ("measles", "influenza7", "influenza15")


def builtin(name: str) -> Scenario:
    """Construct a builtin scenario by name."""
    if name == "measles":
        return Scenario(
            name="measles",
            params=ModelParams(
                mu=5.48e-5,
                omega=0.0,
                beta=3.288,
                sigma=9.82e-2,
                gamma=0.274,
                n_total=1e6,
            ),
            initial=State(s=9.8e5, e=1.5e4, i=5000.0, r=0.0),
            law=no_vaccination(),
            integration=IntegrationConfig(step=0.01, horizon=50.0),
            window=50.0,
        )
    if name in ("influenza7", "influenza15"):
        inv_omega = 7.0 if name == "influenza7" else 15.0
        return Scenario(
            name=name,
            params=ModelParams(
                mu=1.0 / 25550.0,
                omega=1.0 / inv_omega,
                beta=1.66,
                sigma=1.0 / 2.2,
                gamma=1.0 / 2.2,
                n_total=1000.0,
            ),
            initial=State(s=980.0, e=15.0, i=5.0, r=0.0),
            law=no_vaccination(),
            # long horizon so the no-vaccination run settles onto its
            # endemic level; the campaign window stays at 49 days
            integration=IntegrationConfig(step=0.01, horizon=300.0),
            window=49.0,
        )
    raise UnknownBuiltin(
        f"load_scenario: {name!r} is not a builtin "
        f"(builtins: {', '.join(builtin_names())})"
    )


_REQUIRED_KEYS = (
    "name",
    "mu_per_day",
    "omega_per_day",
    "beta_per_day",
    "sigma_per_day",
    "gamma_per_day",
    "n_total",
    "s0",
    "e0",
    "i0",
    "r0",
)

_OPTIONAL_KEYS = {
    "law": "none",
    "g_per_day": "0.0",
    "g1_per_day": "0.0",
    "k0": "1.0",
    "clamp_v": "false",
    "step_days": "0.01",
    "horizon_days": "50.0",
    "record_stride": "10",
    "switch_tol_days": "1e-06",
    "positivity_tol": "1e-09",
    "conservation_tol": "1e-06",
    "window_days": "",
    "week_length_days": "7.0",
    "outputs": "csv,summary",
}


def _parse_float(raw: str, key: str, lineno: int, origin: str) -> float:
    try:
        val = float(raw)
    except ValueError:
        raise ParseError(
            f"{origin}:{lineno}: field {key}: {raw!r} is not a number"
        ) from None
    if not math.isfinite(val):
        raise ParseError(
            f"{origin}:{lineno}: field {key}: {raw!r} is not finite"
        )
    return val


def parse_scenario_text(text: str, origin: str = "<string>") -> Scenario:
    """Parse the key=value format; validates parameters and control gains."""
    seen: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParseError(
                f"{origin}:{lineno}: expected 'key = value', got {stripped!r}"
            )
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _REQUIRED_KEYS and key not in _OPTIONAL_KEYS:
            raise ParseError(f"{origin}:{lineno}: unknown field {key!r}")
        if key in seen:
            raise ParseError(
                f"{origin}:{lineno}: field {key!r} already set on line "
                f"{seen[key][1]}"
            )
        seen[key] = (raw, lineno)
    for key in _REQUIRED_KEYS:
        if key not in seen:
            raise ParseError(f"{origin}: missing required field {key!r}")

    def get(key: str) -> tuple[str, int]:
        if key in seen:
            return seen[key]
        return _OPTIONAL_KEYS[key], 0

    def fget(key: str) -> float:
        raw, lineno = get(key)
        return _parse_float(raw, key, lineno, origin)

    params = ModelParams(
        mu=fget("mu_per_day"),
        omega=fget("omega_per_day"),
        beta=fget("beta_per_day"),
        sigma=fget("sigma_per_day"),
        gamma=fget("gamma_per_day"),
        n_total=fget("n_total"),
    )
    validate_params(params)
    initial = State(s=fget("s0"), e=fget("e0"), i=fget("i0"), r=fget("r0"))

    law_raw, law_line = get("law")
    clamp_raw, clamp_line = get("clamp_v")
    if clamp_raw not in ("true", "false"):
        raise ParseError(
            f"{origin}:{clamp_line}: field clamp_v: expected true or false, "
            f"got {clamp_raw!r}"
        )
    clamp = clamp_raw == "true"
    if law_raw == LAW_NONE:
        law = no_vaccination()
    elif law_raw == LAW1:
        law = law1(g=fget("g_per_day"), k0=fget("k0"), clamp_v=clamp)
    elif law_raw == LAW2:
        law = law2(
            params, g=fget("g_per_day"), g1=fget("g1_per_day"), clamp_v=clamp
        )
    else:
        raise ParseError(
            f"{origin}:{law_line}: field law: expected none, law1, or law2, "
            f"got {law_raw!r}"
        )

    stride_raw, stride_line = get("record_stride")
    try:
        stride = int(stride_raw)
    except ValueError:
        raise ParseError(
            f"{origin}:{stride_line}: field record_stride: {stride_raw!r} "
            "is not an integer"
        ) from None
    integration = IntegrationConfig(
        step=fget("step_days"),
        horizon=fget("horizon_days"),
        record_stride=stride,
        switch_tol=fget("switch_tol_days"),
        positivity_tol=fget("positivity_tol"),
        conservation_tol=fget("conservation_tol"),
    )
    validate_config(integration)

    window_raw, _ = get("window_days")
    window = fget("window_days") if window_raw else integration.horizon

    outputs_raw, outputs_line = get("outputs")
    outputs = tuple(x.strip() for x in outputs_raw.split(",") if x.strip())
    for kind in outputs:
        if kind not in OUTPUT_KINDS:
            raise ParseError(
                f"{origin}:{outputs_line}: field outputs: unknown artifact "
                f"{kind!r} (choices: {', '.join(OUTPUT_KINDS)})"
            )

    name_raw, name_line = get("name")
    if not name_raw:
        raise ParseError(f"{origin}:{name_line}: field name: must be nonempty")

    return Scenario(
        name=name_raw,
        params=params,
        initial=initial,
        law=law,
        integration=integration,
        window=window,
        week_length=fget("week_length_days"),
        outputs=outputs,
    )


def scenario_to_text(sc: Scenario) -> str:
    """Serialize in canonical key order; floats use shortest round-trip
    representation so parse(scenario_to_text(sc)) == sc."""
    lines = [
        f"name = {sc.name}",
        f"mu_per_day = {sc.params.mu!r}",
        f"omega_per_day = {sc.params.omega!r}",
        f"beta_per_day = {sc.params.beta!r}",
        f"sigma_per_day = {sc.params.sigma!r}",
        f"gamma_per_day = {sc.params.gamma!r}",
        f"n_total = {sc.params.n_total!r}",
        f"s0 = {sc.initial.s!r}",
        f"e0 = {sc.initial.e!r}",
        f"i0 = {sc.initial.i!r}",
        f"r0 = {sc.initial.r!r}",
        f"law = {sc.law.kind}",
        f"g_per_day = {sc.law.g!r}",
        f"g1_per_day = {sc.law.g1!r}",
        f"k0 = {sc.law.k0!r}",
        f"clamp_v = {'true' if sc.law.clamp_v else 'false'}",
        f"step_days = {sc.integration.step!r}",
        f"horizon_days = {sc.integration.horizon!r}",
        f"record_stride = {sc.integration.record_stride}",
        f"switch_tol_days = {sc.integration.switch_tol!r}",
        f"positivity_tol = {sc.integration.positivity_tol!r}",
        f"conservation_tol = {sc.integration.conservation_tol!r}",
        f"window_days = {sc.window!r}",
        f"week_length_days = {sc.week_length!r}",
        f"outputs = {','.join(sc.outputs)}",
    ]
    return "\n".join(lines) + "\n"


def save_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(scenario_to_text(sc))


def load_scenario(source: str | Path) -> Scenario:
    """Load a builtin by name or parse a scenario file.

    Emits a UserWarning carrying the admissibility report when the initial
    state fails the outbreak-growth preconditions; simulation stays allowed.
    """
    src = str(source)
    if src in builtin_names():
        sc = builtin(src)
    else:
        path = Path(src)
        if not path.is_file():
            raise UnknownBuiltin(
                f"load_scenario: {src!r} is neither a builtin "
                f"({', '.join(builtin_names())}) nor an existing file"
            )
        sc = parse_scenario_text(path.read_text(), origin=str(path))
    report = check_admissibility(sc.params, sc.initial)
    if not report.admissible:
        warnings.warn(
            f"scenario {sc.name!r}: initial state fails the admissibility "
            f"preconditions: {report}",
            stacklevel=2,
        )
    return sc


def with_law(sc: Scenario, law: ControlLaw) -> Scenario:
    return replace(sc, law=law)
