"""Command-line front end: a thin client over the service handlers.

Each subcommand parses its arguments into a :class:`RunSpec`, which
``execute`` turns into a validated request, dispatches either in-process or
to a running service (``--server URL``), and writes as machine-readable
output. Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Fixed seeds and configs give byte-identical primary output. The only
environment variable honored is TWOPHOTON_WORKERS (Monte Carlo worker
count).
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import httpx
from pydantic import BaseModel, ValidationError

from .errors import ConfigurationError, NumericalError
from .service import handlers
from .service import schemas as sc

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_LOCAL_HANDLERS = {
    "g2-scan": handlers.handle_g2_scan,
    "visibility": handlers.handle_visibility,
    "bell-test": handlers.handle_bell_test,
    "bell-scan": handlers.handle_bell_scan,
    "mc-run": handlers.handle_mc_run,
    "ch74-empirical": handlers.handle_ch74_empirical,
    "timing-check": handlers.handle_timing_check,
}

_RESPONSE_TYPES = {
    "g2-scan": sc.G2ScanResponse,
    "visibility": sc.VisibilityResponse,
    "bell-test": sc.BellTestResponse,
    "bell-scan": sc.BellScanResponse,
    "mc-run": sc.McRunResponse,
    "ch74-empirical": sc.McRunResponse,
    "timing-check": sc.TimingCheckResponse,
}

_G2_COLUMNS = ["phi1", "phi2", "t1", "t2", "g2", "mode"]
_BELL_COLUMNS = ["d12", "d12p", "d1p2", "d1p2p", "value", "violated"]
_CLICK_COLUMNS = [
    "trial", "detector", "detection_time_ns", "emission_time_ns",
    "phase_setting_rad", "accepted",
]


@dataclass(frozen=True)
class RunSpec:
    """One parsed CLI invocation."""

    command: str
    config_path: str
    output: str = "json"  # "csv" or "json"
    seed_override: int | None = None
    trials_override: int | None = None
    mode_override: str | None = None


def parse_config(path) -> sc.RunConfigSpec:
    """Load and validate a JSON run config.

    Validation failures are reported with field paths; the geometry builders
    run here too so far-field violations surface before any computation.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
    try:
        spec = sc.RunConfigSpec.model_validate(payload)
    except ValidationError as exc:
        details = "; ".join(
            "{}: {}".format(".".join(str(loc) for loc in err["loc"]), err["msg"])
            for err in exc.errors()
        )
        raise ConfigurationError(f"invalid config: {details}") from exc
    pair = sc.build_pair(spec.geometry)
    sc.build_detectors(spec.geometry, pair)
    return spec


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message}}, sort_keys=True) + "\n")


def _dispatch(server: str | None, command: str, request: BaseModel) -> BaseModel:
    """Run a request locally or against a remote service instance."""
    if server is None:
        return _LOCAL_HANDLERS[command](request)
    url = server.rstrip("/") + "/api/" + command
    response = httpx.post(url, json=request.model_dump(mode="json"), timeout=600.0)
    if response.status_code == 422:
        raise ConfigurationError(f"server rejected the request: {response.text}")
    if response.status_code >= 400:
        raise NumericalError(f"server error {response.status_code}: {response.text}")
    return _RESPONSE_TYPES[command].model_validate(response.json())


def _write_text(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _json_payload(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def _csv_payload(rows, columns) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def execute(
    spec: RunSpec,
    server: str | None = None,
    out: str | None = None,
    ch74: bool = False,
    clicks_out: str | None = None,
    clicks_max: int = 10_000,
) -> None:
    """Validate the config, dispatch one invocation, and write its outputs."""
    config = parse_config(spec.config_path)

    if spec.command == "g2-scan":
        request = sc.G2ScanRequest(config=config, mode=spec.mode_override)
        response = _dispatch(server, spec.command, request)
        if spec.output == "csv":
            rows = [(r.phi1, r.phi2, r.t1, r.t2, r.g2, r.mode) for r in response.rows]
            _write_text(out, _csv_payload(rows, _G2_COLUMNS))
        else:
            _write_text(out, _json_payload(response))

    elif spec.command == "visibility":
        request = sc.VisibilityRequest(config=config, mode=spec.mode_override)
        _write_text(out, _json_payload(_dispatch(server, spec.command, request)))

    elif spec.command == "bell-test":
        request = sc.BellTestRequest(config=config)
        _write_text(out, _json_payload(_dispatch(server, spec.command, request)))

    elif spec.command == "bell-scan":
        response = _dispatch(server, spec.command, sc.BellScanRequest(config=config))
        if out is not None:
            if response.results is None:
                sys.stderr.write(
                    "note: grid exceeds bell_scan.max_kept; per-point CSV skipped\n"
                )
            else:
                rows = [
                    (p.d12, p.d12p, p.d1p2, p.d1p2p, p.value, p.violated)
                    for p in response.results
                ]
                _write_text(out, _csv_payload(rows, _BELL_COLUMNS))
        summary = response.model_copy(update={"results": None})
        sys.stdout.write(_json_payload(summary))

    elif spec.command == "mc-run":
        request = sc.McRunRequest(
            config=config,
            seed=spec.seed_override,
            trials=spec.trials_override,
            mode=spec.mode_override,
        )
        command = "ch74-empirical" if ch74 else "mc-run"
        _write_text(out, _json_payload(_dispatch(server, command, request)))
        if clicks_out is not None:
            # click export is always produced locally from the same request
            rows = [
                (r.trial, r.detector, r.detection_time_ns, r.emission_time_ns,
                 r.phase_setting_rad, r.accepted)
                for r in handlers.click_rows(request, max_trials=clicks_max)
            ]
            _write_text(clicks_out, _csv_payload(rows, _CLICK_COLUMNS))

    elif spec.command == "timing-check":
        request = sc.TimingCheckRequest(config=config)
        _write_text(out, _json_payload(_dispatch(server, spec.command, request)))

    else:
        raise ConfigurationError(f"unknown command {spec.command!r}")


def _guarded(func):
    try:
        func()
    except (ConfigurationError, ValidationError, ValueError) as exc:
        # core operations raise ValueError for argument-level violations that
        # only a bad configuration can produce here
        _emit_error("configuration", str(exc))
        sys.exit(EXIT_CONFIG)
    except NumericalError as exc:
        _emit_error("numerical", str(exc))
        sys.exit(EXIT_NUMERICAL)
    except httpx.HTTPError as exc:
        _emit_error("numerical", f"request failed: {exc}")
        sys.exit(EXIT_NUMERICAL)


@click.group()
@click.option("--server", default=None, metavar="URL", help="Run against a service instead of in-process.")
@click.pass_context
def main(ctx, server):
    """Two-photon interference simulator."""
    ctx.obj = {"server": server}


_config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(), help="JSON run config."
)
_out_option = click.option("--out", default=None, type=click.Path(), help="Output file (default stdout).")
_mode_option = click.option(
    "--mode", default=None, type=click.Choice(["single_envelope", "dual_envelope"]),
    help="Override the configured closed-form route.",
)


@main.command("g2-scan")
@_config_option
@_out_option
@_mode_option
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]))
@click.pass_context
def g2_scan(ctx, config_path, out, mode, fmt):
    """Scan the normalized coincidence density over the detector-2 phase."""
    spec = RunSpec(command="g2-scan", config_path=config_path, output=fmt, mode_override=mode)
    _guarded(lambda: execute(spec, server=ctx.obj["server"], out=out))


@main.command("visibility")
@_config_option
@_out_option
@_mode_option
@click.pass_context
def visibility(ctx, config_path, out, mode):
    """Fringe contrast of the coincidence signal at the configured times."""
    spec = RunSpec(command="visibility", config_path=config_path, mode_override=mode)
    _guarded(lambda: execute(spec, server=ctx.obj["server"], out=out))


@main.command("bell-test")
@_config_option
@_out_option
@click.pass_context
def bell_test(ctx, config_path, out):
    """Evaluate the CH74 inequality at the configured phase settings."""
    spec = RunSpec(command="bell-test", config_path=config_path)
    _guarded(lambda: execute(spec, server=ctx.obj["server"], out=out))


@main.command("bell-scan")
@_config_option
@_out_option
@click.pass_context
def bell_scan(ctx, config_path, out):
    """Scan the CH74 value over a phase-difference grid.

    The summary goes to stdout; --out writes one CSV row per grid point when
    the grid is small enough to materialize (bell_scan.max_kept).
    """
    spec = RunSpec(command="bell-scan", config_path=config_path)
    _guarded(lambda: execute(spec, server=ctx.obj["server"], out=out))


@main.command("mc-run")
@_config_option
@_out_option
@click.option("--seed", default=None, type=int, help="Override the configured seed.")
@click.option("--trials", default=None, type=int, help="Override the configured trial count.")
@_mode_option
@click.option("--ch74", is_flag=True, help="Estimate the CH74 value at the config's bell settings.")
@click.option("--clicks-out", default=None, type=click.Path(), help="Write a click-stream CSV.")
@click.option("--clicks-max", default=10_000, type=int, show_default=True,
              help="Cap on trials materialized into the click stream.")
@click.pass_context
def mc_run(ctx, config_path, out, seed, trials, mode, ch74, clicks_out, clicks_max):
    """Seeded Monte Carlo run: fringe scan, estimates, optional click export."""
    spec = RunSpec(
        command="mc-run",
        config_path=config_path,
        seed_override=seed,
        trials_override=trials,
        mode_override=mode,
    )
    _guarded(
        lambda: execute(
            spec,
            server=ctx.obj["server"],
            out=out,
            ch74=ch74,
            clicks_out=clicks_out,
            clicks_max=clicks_max,
        )
    )


@main.command("timing-check")
@_config_option
@_out_option
@click.pass_context
def timing_check(ctx, config_path, out):
    """Lifetime, transit time and the no-overlap/no-signaling window."""
    spec = RunSpec(command="timing-check", config_path=config_path)
    _guarded(lambda: execute(spec, server=ctx.obj["server"], out=out))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
