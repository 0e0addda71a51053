"""Command-line front end.

Subcommands: ``efficiency-sweep``, ``protocol-sim``, ``fringes``,
``feasibility``. Parameters come from flags, optionally backed by a
``key = value`` config file (flags override file values; unknown file keys
are rejected). All outputs are deterministic for a fixed config and seed.

Exit codes: 0 success, 2 I/O failure, 3 parameter validation failure,
4 internal contract violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolationError, ParameterError
from .protocol import (
    DetectorModel,
    ProtocolConfig,
    count_budget,
    estimate_metrics,
    run_trials,
)
from .resonator import (
    ResonatorParams,
    efficiency_sweep,
    max_round_trips_from_coherence,
    pulse_round_trip_ratio,
    round_trip_time,
)
from .welcherweg import (
    NEON20_MASS_KG,
    DoubleSlitGeometry,
    PathMonitor,
    VelocityGroup,
    simulate_run,
    visibility_with_stderr,
)

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARAMS = 3
EXIT_CONTRACT = 4

DEFAULT_SWEEP_REFLECTIVITIES = "0.95,0.99,0.995,0.997,0.998"


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on bad usage; the contract says 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAMS, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class _Opt:
    name: str                 # flag name, dashed
    type: Callable
    default: object = None
    required: bool = False
    help: str = ""
    choices: Optional[tuple] = None


_COMMON = [_Opt("config", str, help="key = value config file; flags override it")]

_OPTIONS: dict[str, list[_Opt]] = {
    "efficiency-sweep": [
        _Opt("reflectivity", str, DEFAULT_SWEEP_REFLECTIVITIES,
             help="comma-separated reflectivity list"),
        _Opt("round-trips", int, 2000, help="maximum round-trip count n_max"),
        _Opt("seed", int, 0, help="accepted for interface uniformity (sweep is deterministic)"),
        _Opt("out", str, required=True, help="output CSV path"),
        _Opt("format", str, "csv", choices=("csv",)),
    ],
    "protocol-sim": [
        _Opt("reflectivity", float, 0.999),
        _Opt("round-trips", int, 10_013, help="free round trips n for the empty-cavity case"),
        _Opt("trials", int, 1000),
        _Opt("seed", int, 0),
        _Opt("time-window", float, 1e-6, help="single-photon time window [s]"),
        _Opt("clicks-required", int, 2, help="consecutive clicks that end a trial"),
        _Opt("detector-efficiency", float, 0.85),
        _Opt("dark-count-rate", float, 0.0, help="detector dark counts [Hz]"),
        _Opt("max-photons", int, 10_000),
        _Opt("truth", str, "present", choices=("present", "absent")),
        _Opt("out", str, required=True, help="output CSV path"),
        _Opt("format", str, "csv", choices=("csv",)),
    ],
    "fringes": [
        _Opt("p-tag", float, 0.5, help="per-transit tagging probability for the monitored run"),
        _Opt("atoms", int, 100_000),
        _Opt("bins", int, 121),
        _Opt("seed", int, 0),
        _Opt("reflectivity", float, 0.999, help="monitor resonator reflectivity"),
        _Opt("round-trips", int, 10_013),
        _Opt("slit-separation", float, 6e-6),
        _Opt("slit-width", float, 2e-6),
        _Opt("screen-distance", float, 0.85),
        _Opt("gravity", float, 9.81),
        _Opt("mass", float, NEON20_MASS_KG),
        _Opt("speed", float, 2.0, help="arrival speed at the screen [m/s]"),
        _Opt("fall-time", float, 0.1),
        _Opt("out", str, required=True, help="output CSV path"),
        _Opt("format", str, "csv", choices=("csv",)),
    ],
    "feasibility": [
        _Opt("length", float, 0.04, help="geometrical round-trip path [m]"),
        _Opt("index", float, 1.0, help="effective refractive index"),
        _Opt("coherence-length", float, 3e5),
        _Opt("pulse-duration", float, 250e-12),
        _Opt("observation-time", float, 0.1),
        _Opt("recovery-time", float, 1e-8),
        _Opt("cycle-period", float, 0.4),
        _Opt("fibers", int, 300),
        _Opt("seed", int, 0, help="accepted for interface uniformity"),
        _Opt("out", str, help="optional path for the text report"),
    ],
}


def _dest(name: str) -> str:
    return name.replace("-", "_")


def build_parser() -> _Parser:
    parser = _Parser(prog="motirr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for command, options in _OPTIONS.items():
        p = sub.add_parser(command)
        for opt in _COMMON + options:
            kwargs = {"type": opt.type, "default": None, "help": opt.help}
            if opt.choices:
                kwargs["choices"] = opt.choices
            p.add_argument(f"--{opt.name}", **kwargs)
        p.set_defaults(command=command)
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    with open(path, "r") as fh:
        text = fh.read()
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, value = stripped.split("=", 1)
        values[key.strip().replace("_", "-")] = value.strip()
    return values


def _effective_params(args: argparse.Namespace) -> dict[str, object]:
    """Merge CLI flags over config-file values over defaults."""
    options = _OPTIONS[args.command]
    file_values: dict[str, str] = {}
    if args.config is not None:
        file_values = _read_config_file(args.config)
        known = {opt.name for opt in options}
        unknown = set(file_values) - known
        if unknown:
            raise ParameterError(
                f"unknown config keys for {args.command}: {', '.join(sorted(unknown))}")
    params: dict[str, object] = {}
    for opt in options:
        value = getattr(args, _dest(opt.name))
        if value is None and opt.name in file_values:
            try:
                value = opt.type(file_values[opt.name])
            except ValueError as exc:
                raise ParameterError(
                    f"config key {opt.name}: cannot parse {file_values[opt.name]!r}") from exc
            if opt.choices and value not in opt.choices:
                raise ParameterError(
                    f"config key {opt.name}: {value!r} not one of {opt.choices}")
        if value is None:
            value = opt.default
        if value is None and opt.required:
            raise ParameterError(f"--{opt.name} is required for {args.command}")
        params[_dest(opt.name)] = value
    return params


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # shortest round-trip decimal
    return str(value)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def cmd_efficiency_sweep(params: dict) -> int:
    try:
        r_list = [float(tok) for tok in str(params["reflectivity"]).split(",") if tok.strip()]
    except ValueError as exc:
        raise ParameterError(f"cannot parse reflectivity list {params['reflectivity']!r}") from exc
    rows = efficiency_sweep(r_list, params["round_trips"])
    lines = ["R,n,eta_closed_form,eta_brute_force"]
    for row in rows:
        lines.append(f"{_fmt(row.reflectivity)},{row.round_trips},"
                     f"{_fmt(row.eta_closed_form)},{_fmt(row.eta_brute_force)}")
    _write_text(params["out"], "\n".join(lines) + "\n")
    print(f"wrote {len(rows)} rows to {params['out']}")
    return EXIT_OK


def cmd_protocol_sim(params: dict) -> int:
    if params["trials"] < 1:
        raise ParameterError(f"trials must be >= 1, got {params['trials']}")
    resonator = ResonatorParams(reflectivity=params["reflectivity"],
                                round_trips=params["round_trips"])
    detector = DetectorModel(quantum_efficiency=params["detector_efficiency"],
                             dark_count_rate=params["dark_count_rate"])
    config = ProtocolConfig(
        resonator=resonator,
        detector=detector,
        consecutive_clicks_required=params["clicks_required"],
        time_window=params["time_window"],
        max_photons=params["max_photons"],
        rng_seed=params["seed"],
    )
    truth = params["truth"] == "present"
    records = run_trials(config, truth, params["trials"])
    metrics = estimate_metrics(records)

    summary = (
        f"misclassification_rate={_fmt(metrics.misclassification_rate)} "
        f"inconclusive_rate={_fmt(metrics.inconclusive_rate)} "
        f"energy_exchange_free_fraction={_fmt(metrics.energy_exchange_free_fraction)} "
        f"mean_photons_absorbed={_fmt(metrics.mean_photons_absorbed)} "
        f"max_photons_absorbed={metrics.max_photons_absorbed} "
        f"mean_windows={_fmt(metrics.mean_windows)}"
    )
    lines = [f"# {item}" for item in summary.split(" ")]
    lines.append("trial_index,truth,decision,photons_sent,photons_absorbed,windows")
    for index, record in enumerate(records):
        if record.decision is None:
            decision = "inconclusive"
        else:
            decision = "present" if record.decision else "absent"
        lines.append(
            f"{index},{'present' if record.truth else 'absent'},{decision},"
            f"{record.photons_sent},{record.photons_absorbed_by_object},"
            f"{record.elapsed_windows}")
    _write_text(params["out"], "\n".join(lines) + "\n")
    print(summary)
    return EXIT_OK


def cmd_fringes(params: dict) -> int:
    geometry = DoubleSlitGeometry(
        slit_separation=params["slit_separation"],
        slit_width=params["slit_width"],
        slit_to_screen_distance=params["screen_distance"],
        gravity=params["gravity"],
    )
    group = VelocityGroup(
        mass=params["mass"],
        speed_at_screen=params["speed"],
        fall_time=params["fall_time"],
    )
    monitor = PathMonitor(
        resonator=ResonatorParams(reflectivity=params["reflectivity"],
                                  round_trips=params["round_trips"]),
        tagging_probability=params["p_tag"],
    )
    seed = params["seed"] & 0xFFFFFFFFFFFFFFFF

    def stream(stream_id: int) -> np.random.Generator:
        key = np.array([seed, stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    unmonitored = simulate_run(geometry, group, None,
                               params["atoms"], params["bins"], stream(0))
    monitored = simulate_run(geometry, group, monitor,
                             params["atoms"], params["bins"], stream(1))
    v_unmon, se_unmon = visibility_with_stderr(unmonitored)
    v_mon, se_mon = visibility_with_stderr(monitored)

    lines = [
        f"# n_atoms={params['atoms']}",
        f"# bins={params['bins']}",
        f"# seed={params['seed']}",
        f"# p_tag={_fmt(params['p_tag'])}",
        f"# visibility_unmonitored={_fmt(v_unmon)}",
        f"# visibility_unmonitored_stderr={_fmt(se_unmon)}",
        f"# visibility_monitored={_fmt(v_mon)}",
        f"# visibility_monitored_stderr={_fmt(se_mon)}",
        "bin_center,count,mode",
    ]
    for pattern in (unmonitored, monitored):
        for center, count in zip(pattern.bin_centers, pattern.counts):
            lines.append(f"{_fmt(float(center))},{int(count)},{pattern.mode}")
    _write_text(params["out"], "\n".join(lines) + "\n")
    print(f"visibility_unmonitored={_fmt(v_unmon)} visibility_monitored={_fmt(v_mon)}")
    return EXIT_OK


def cmd_feasibility(params: dict) -> int:
    t = round_trip_time(params["length"], params["index"])
    ratio = pulse_round_trip_ratio(params["pulse_duration"], t)
    n_coherence = max_round_trips_from_coherence(params["coherence_length"], params["length"])
    budget_fall = count_budget(params["observation_time"], params["recovery_time"],
                               params["fibers"])
    budget_cycle = count_budget(params["cycle_period"], params["recovery_time"],
                                params["fibers"])
    lines = [
        f"round_trip_length_m={_fmt(params['length'])}",
        f"effective_index={_fmt(params['index'])}",
        f"round_trip_time_s={_fmt(t)}",
        f"pulse_duration_s={_fmt(params['pulse_duration'])}",
        f"pulse_to_round_trip_ratio={_fmt(ratio)}",
        f"pulse_spans_full_round_trip={_fmt(ratio >= 1.0)}",
        f"coherence_length_m={_fmt(params['coherence_length'])}",
        f"max_round_trips_from_coherence={n_coherence}",
        f"observation_time_s={_fmt(params['observation_time'])}",
        f"recovery_time_s={_fmt(params['recovery_time'])}",
        f"n_fibers={params['fibers']}",
        f"counts_per_channel={budget_fall.per_channel}",
        f"counts_aggregate={budget_fall.aggregate}",
        f"cycle_period_s={_fmt(params['cycle_period'])}",
        f"counts_per_channel_cycle_reading={budget_cycle.per_channel}",
        f"counts_aggregate_cycle_reading={budget_cycle.aggregate}",
    ]
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if params["out"] is not None:
        _write_text(params["out"], report)
    return EXIT_OK


_HANDLERS = {
    "efficiency-sweep": cmd_efficiency_sweep,
    "protocol-sim": cmd_protocol_sim,
    "fringes": cmd_fringes,
    "feasibility": cmd_feasibility,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse help (0) or our error() (3)
        return int(exc.code or 0)
    try:
        params = _effective_params(args)
        return _HANDLERS[args.command](params)
    except ParameterError as exc:
        print(f"motirr: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as exc:
        print(f"motirr: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ContractViolationError as exc:
        print(f"motirr: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    raise SystemExit(main())
