"""Command-line front end.

Subcommands: ``family`` tabulates a coherent-state probability family next
to its closed-form pmf, ``infer`` tabulates the POV-quadrature posterior
next to the analytic Gamma/Beta density, and ``verify`` runs the named
residual checks.  Output is a JSON document (schema_version, command,
config, rows, footer) or a CSV table with ``# key=value`` footer lines.
Exit codes: 0 success or all checks passing, 1 verification failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import fock, inference, spin
from .pv_measure import Observable, VectorState, born_probabilities, pv_from_observable

__all__ = ["ConfigError", "RunConfig", "UsageError", "load_config", "main"]

SCHEMA_VERSION = 1

_ROW_CUMULATIVE_STOP = 1e-12

VERIFY_CHECKS = ("ladder", "bch", "gauss", "identity", "translation", "example12")


class ConfigError(Exception):
    """Malformed configuration file or invalid setting."""


class UsageError(Exception):
    """Invalid command parameters."""


@dataclass(frozen=True)
class RunConfig:
    """Effective settings for one command invocation.

    ``tol`` overrides the per-check residual thresholds of ``verify``;
    when unset each check uses its documented default.
    """

    trunc: int | None = None
    tol: float | None = None
    tail_tol: float = 1e-12
    n_r: int = 200
    n_angle: int = 65
    n_theta: int | None = None
    n_gamma: int | None = None
    lambda_points: int = 2001
    p_points: int = 1001
    mass_levels: tuple[float, ...] = (0.5, 0.9, 0.95)
    format: str = "json"
    seed: int = 0
    out: str | None = None

    def echo(self) -> dict:
        """Settings echoed under the output's ``config`` key (paths excluded)."""
        settings = dataclasses.asdict(self)
        settings.pop("out")
        settings["mass_levels"] = list(self.mass_levels)
        return settings


_CONFIG_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {"out"}
_FLAG_KEYS = ("trunc", "tol", "format", "seed", "out")


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge documented defaults, config-file values, and command flags.

    Flags override file values, file values override defaults.  Unknown
    file keys raise ConfigError naming the key.
    """
    settings: dict = {}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        try:
            raw = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {config_path} must hold a JSON object")
        for key, value in raw.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            settings[key] = value
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if "mass_levels" in settings:
        settings["mass_levels"] = tuple(float(m) for m in settings["mass_levels"])
    try:
        config = RunConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    _validate_config(config)
    return config


def _validate_config(config: RunConfig) -> None:
    if config.trunc is not None and config.trunc < 2:
        raise ConfigError(f"trunc must be at least 2, got {config.trunc!r}")
    if config.tol is not None and config.tol <= 0:
        raise ConfigError(f"tol must be positive, got {config.tol!r}")
    if config.tail_tol <= 0:
        raise ConfigError(f"tail_tol must be positive, got {config.tail_tol!r}")
    for name in ("n_r", "n_angle", "lambda_points", "p_points"):
        if getattr(config, name) < 2:
            raise ConfigError(f"{name} must be at least 2, got {getattr(config, name)!r}")
    for name in ("n_theta", "n_gamma"):
        value = getattr(config, name)
        if value is not None and value < 1:
            raise ConfigError(f"{name} must be positive, got {value!r}")
    for level in config.mass_levels:
        if not 0.0 < level < 1.0:
            raise ConfigError(f"mass levels must lie strictly between 0 and 1, got {level!r}")
    if config.format not in ("json", "csv"):
        raise ConfigError(f"format must be 'json' or 'csv', got {config.format!r}")
    if config.seed < 0:
        raise ConfigError(f"seed must be nonnegative, got {config.seed!r}")


def _payload(command: str, config: RunConfig, rows: list[dict], footer: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config.echo(),
        "rows": rows,
        "footer": footer,
    }


# ---------------------------------------------------------------------------
# family


def _family_poisson(config: RunConfig, lam: float) -> dict:
    if lam is None:
        raise UsageError("poisson family requires --lambda")
    if lam < 0 or not math.isfinite(lam):
        raise UsageError(f"lambda must be a finite nonnegative rate, got {lam!r}")
    alpha = math.sqrt(lam)
    trunc = config.trunc if config.trunc is not None else fock.default_truncation(alpha)
    state = fock.coherent_closed_form(alpha, fock.FockSpace(trunc), tail_tol=config.tail_tol)
    coherent_probs = np.abs(state.vector.vector) ** 2

    rows = []
    cumulative = 0.0
    max_diff = 0.0
    for n in range(trunc):
        pmf = fock.poisson_pmf(alpha, n)
        rows.append({"outcome": n, "probability": float(coherent_probs[n]), "pmf": pmf})
        max_diff = max(max_diff, abs(coherent_probs[n] - pmf))
        cumulative += pmf
        if cumulative >= 1.0 - _ROW_CUMULATIVE_STOP:
            break
    footer = {
        "max_abs_diff": float(max_diff),
        "trunc": trunc,
        "tail_mass": state.tail_mass,
    }
    return _payload("family", config, rows, footer)


def _family_binomial(config: RunConfig, n: int, p: float) -> dict:
    if n is None or p is None:
        raise UsageError("binomial family requires --n and --p")
    if n < 0:
        raise UsageError(f"n must be nonnegative, got {n!r}")
    if not 0.0 <= p < 1.0:
        raise UsageError(f"p must lie in [0, 1), got {p!r}")
    rep = spin.build_spin_rep(n / 2.0)
    point = spin.sphere_point_for_probability(p)
    state = spin.spin_coherent_closed_form(rep, point)
    coherent_probs = np.abs(state.vector.vector) ** 2

    rows = []
    max_diff = 0.0
    for k in range(n + 1):
        pmf = spin.binomial_pmf(rep, point, k - rep.j)
        rows.append({"outcome": k, "probability": float(coherent_probs[k]), "pmf": pmf})
        max_diff = max(max_diff, abs(coherent_probs[k] - pmf))
    footer = {"max_abs_diff": float(max_diff), "theta": point.theta}
    return _payload("family", config, rows, footer)


# ---------------------------------------------------------------------------
# infer


def _infer_rows(pov, analytic) -> tuple[list[dict], float]:
    rows = []
    sup_diff = 0.0
    for x, d_pov, d_ana in zip(pov.grid, pov.density, analytic.density):
        diff = abs(d_pov - d_ana)
        sup_diff = max(sup_diff, diff)
        rows.append(
            {
                "parameter": float(x),
                "density_pov": float(d_pov),
                "density_analytic": float(d_ana),
                "absdiff": float(diff),
            }
        )
    return rows, float(sup_diff)


def _interval_records(config: RunConfig, dist) -> list[dict]:
    records = []
    for level in config.mass_levels:
        low, high = inference.credible_interval(dist, level)
        records.append({"mass": level, "low": low, "high": high})
    return records


def _infer_poisson(config: RunConfig, observed: int) -> dict:
    if observed is None:
        raise UsageError("poisson inference requires --observed")
    if observed < 0:
        raise UsageError(f"observed count must be nonnegative, got {observed!r}")
    grid = inference.default_lambda_grid(observed, config.lambda_points)
    rule = inference.plane_quadrature(
        inference.default_radial_cutoff(float(grid[-1])), config.n_r, config.n_angle
    )
    dim = config.trunc if config.trunc is not None else max(64, observed + 1)
    if dim <= observed:
        raise UsageError(f"trunc {dim} must exceed the observed count {observed}")
    pov = inference.infer_via_pov(observed, inference.FockCoherentFamily(dim), rule, grid)
    analytic = inference.analytic_poisson_posterior(observed, grid)
    rows, sup_diff = _infer_rows(pov, analytic)
    footer = {
        "total_mass_pov": pov.total_mass,
        "total_mass_analytic": analytic.total_mass,
        "sup_abs_diff": sup_diff,
        "credible_intervals": _interval_records(config, pov),
    }
    return _payload("infer", config, rows, footer)


def _infer_binomial(config: RunConfig, n: int, k: int) -> dict:
    if n is None or k is None:
        raise UsageError("binomial inference requires --n and --k")
    if n < 0 or not 0 <= k <= n:
        raise UsageError(f"need 0 <= k <= n, got n={n!r}, k={k!r}")
    rep = spin.build_spin_rep(n / 2.0)
    n_theta = config.n_theta if config.n_theta is not None else rep.two_j + 2
    n_gamma = config.n_gamma if config.n_gamma is not None else 2 * rep.two_j + 1
    rule = inference.sphere_quadrature(rep.j, n_theta, n_gamma)
    grid = inference.default_p_grid(config.p_points)
    pov = inference.infer_via_pov(k, inference.SpinCoherentFamily(rep), rule, grid)
    analytic = inference.analytic_binomial_posterior(n, k, grid)
    rows, sup_diff = _infer_rows(pov, analytic)
    footer = {
        "total_mass_pov": pov.total_mass,
        "total_mass_analytic": analytic.total_mass,
        "sup_abs_diff": sup_diff,
        "credible_intervals": _interval_records(config, pov),
    }
    return _payload("infer", config, rows, footer)


# ---------------------------------------------------------------------------
# verify


def _fmt_complex(z: complex) -> str:
    return f"{z.real:g}{z.imag:+g}j"


def _threshold(config: RunConfig, default: float) -> float:
    return config.tol if config.tol is not None else default


def _verify_row(check: str, params: str, residual: float, threshold: float) -> dict:
    return {
        "check": check,
        "params": params,
        "residual": float(residual),
        "threshold": threshold,
        "status": "pass" if residual < threshold else "fail",
    }


def _check_example12(config: RunConfig) -> list[dict]:
    pv = pv_from_observable(Observable.from_matrix(np.diag([1.0, 0.0, -1.0])))
    rows = []
    cases = {
        "xi": (VectorState.from_unnormalized([1.0, 2.0, 3.0j]), np.array([1, 4, 9]) / 14.0),
        "psi0": (VectorState(np.array([-1.0j, math.sqrt(2.0), 1.0j]) / 2.0), np.array([1, 2, 1]) / 4.0),
    }
    for name, (state, exact) in cases.items():
        probs = born_probabilities(state, pv)
        residual = float(np.abs(probs - exact).max())
        shown = " ".join(f"{p:.10g}" for p in probs)
        rows.append(_verify_row("example12", f"state={name} probs=[{shown}]", residual, _threshold(config, 1e-14)))
    return rows


def _check_ladder(config: RunConfig) -> list[dict]:
    trunc = config.trunc if config.trunc is not None else 256
    rep = fock.build_ladder(trunc)
    rows = []

    ladder_defect = max(
        float(np.abs(rep.annihilation - np.diag(np.sqrt(np.arange(1.0, trunc)), 1)).max()),
        float(np.abs(rep.creation - rep.annihilation.conj().T).max()),
        float(np.abs(rep.number - np.diag(np.arange(float(trunc)))).max()),
        float(np.abs(rep.number - rep.creation @ rep.annihilation).max()),
    )
    rows.append(_verify_row("ladder", f"relations trunc={trunc}", ladder_defect, _threshold(config, 1e-12)))

    truncated_identity = np.eye(trunc)
    truncated_identity[-1, -1] = -(trunc - 1.0)
    comm_defect = float(
        np.abs(rep.annihilation @ rep.creation - rep.creation @ rep.annihilation - truncated_identity).max()
    )
    rows.append(_verify_row("ladder", f"commutation trunc={trunc}", comm_defect, _threshold(config, 1e-12)))

    e1, e2, e3 = spin.so3_basis()
    so3_defect = max(
        float(np.abs(e1 @ e2 - e2 @ e1 - e3).max()),
        float(np.abs(e2 @ e3 - e3 @ e2 - e1).max()),
        float(np.abs(e3 @ e1 - e1 @ e3 - e2).max()),
    )
    rows.append(_verify_row("ladder", "so3 commutators", so3_defect, _threshold(config, 1e-12)))

    srep = spin.build_spin_rep(25)
    spin_defect = max(
        float(np.abs(srep.j3 @ srep.j_plus - srep.j_plus @ srep.j3 - srep.j_plus).max()),
        float(np.abs(srep.j3 @ srep.j_minus - srep.j_minus @ srep.j3 + srep.j_minus).max()),
        float(np.abs(srep.j_plus @ srep.j_minus - srep.j_minus @ srep.j_plus - 2.0 * srep.j3).max()),
    )
    rows.append(_verify_row("ladder", "spin commutators j=25", spin_defect, _threshold(config, 1e-12)))
    return rows


def _check_bch(config: RunConfig, alpha: complex) -> list[dict]:
    trunc = config.trunc if config.trunc is not None else 64
    residual = fock.bch_check(alpha, fock.build_ladder(trunc))
    return [_verify_row("bch", f"alpha={_fmt_complex(alpha)} trunc={trunc}", residual, _threshold(config, 1e-10))]


def _check_gauss(config: RunConfig) -> list[dict]:
    # theta capped at 1.0: the triangular factors span a dynamic range of
    # sec^{2j}(theta/2), and beyond this the double-precision cancellation
    # in their product exceeds the 1e-9 threshold for j near 10 even
    # though the identity is exact.
    rng = np.random.default_rng(config.seed)
    rows = []
    for two_j in range(1, 21):
        theta = rng.uniform(0.05, 1.0)
        gamma = rng.uniform(0.0, 2.0 * math.pi)
        point = spin.SpherePoint(theta=theta, gamma=gamma)
        residual = spin.gauss_decomposition_check(spin.build_spin_rep(two_j / 2.0), point)
        rows.append(
            _verify_row("gauss", f"j={two_j / 2} theta={theta:.4f} gamma={gamma:.4f}", residual, _threshold(config, 1e-9))
        )
    return rows


def _check_translation(config: RunConfig) -> list[dict]:
    trunc = config.trunc if config.trunc is not None else 64
    rep = fock.build_ladder(trunc)
    rng = np.random.default_rng(config.seed)
    rows = []
    for _ in range(10):
        alpha, beta = (
            2.0 * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
            for _ in range(2)
        )
        overlap, phase = fock.displacement_translation_check(alpha, beta, rep)
        expected = np.exp(1j * (beta * np.conjugate(alpha)).imag)
        residual = max(abs(overlap - 1.0), abs(phase - expected))
        rows.append(
            _verify_row(
                "translation",
                f"alpha={_fmt_complex(alpha)} beta={_fmt_complex(beta)} trunc={trunc}",
                residual,
                _threshold(config, 1e-8),
            )
        )
    return rows


def _check_identity(config: RunConfig) -> list[dict]:
    rows = []
    for j in (0.5, 1.0, 2.0, 5.0):
        rep = spin.build_spin_rep(j)
        rule = inference.sphere_quadrature(j, rep.two_j + 2, 2 * rep.two_j + 1)
        residual = inference.resolution_of_identity_check(inference.SpinCoherentFamily(rep), rule)
        rows.append(_verify_row("identity", f"spin j={j}", residual, _threshold(config, 1e-12)))
    rule = inference.plane_quadrature(10.0, config.n_r, max(config.n_angle, 65))
    residual = inference.resolution_of_identity_check(
        inference.FockCoherentFamily(32), rule, n_basis=20
    )
    rows.append(
        _verify_row("identity", f"plane trunc=32 cutoff=10 n_r={config.n_r}", residual, _threshold(config, 1e-8))
    )
    return rows


def _cmd_verify(config: RunConfig, check: str, alpha: complex) -> tuple[dict, int]:
    runners = {
        "example12": lambda: _check_example12(config),
        "ladder": lambda: _check_ladder(config),
        "bch": lambda: _check_bch(config, alpha),
        "gauss": lambda: _check_gauss(config),
        "translation": lambda: _check_translation(config),
        "identity": lambda: _check_identity(config),
    }
    if check == "all":
        names = VERIFY_CHECKS
    elif check in runners:
        names = (check,)
    else:
        raise UsageError(f"unknown check {check!r}; choose from {('all',) + VERIFY_CHECKS}")
    rows = []
    for name in names:
        rows.extend(runners[name]())
    all_pass = all(row["status"] == "pass" for row in rows)
    footer = {"all_pass": all_pass, "n_checks": len(rows)}
    return _payload("verify", config, rows, footer), 0 if all_pass else 1


# ---------------------------------------------------------------------------
# rendering


def _fmt_cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _render_csv(payload: dict) -> str:
    rows = payload["rows"]
    columns = list(rows[0].keys()) if rows else []
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt_cell(row[c]) for c in columns))
    for key, value in payload["footer"].items():
        if key == "credible_intervals":
            for record in value:
                lines.append(
                    "# credible_interval "
                    + " ".join(f"{k}={_fmt_cell(v)}" for k, v in record.items())
                )
        else:
            lines.append(f"# {key}={_fmt_cell(value)}")
    return "\n".join(lines) + "\n"


def _emit(payload: dict, config: RunConfig) -> None:
    if config.format == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        text = _render_csv(payload)
    if config.out is None:
        sys.stdout.write(text)
    else:
        Path(config.out).write_text(text)


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohstat",
        description="Coherent-state probability families and their inferred posteriors.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trunc", type=int, help="Fock truncation / basis size")
    common.add_argument("--tol", type=float, help="numerical tolerance for route matching")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"], help="output format")
    common.add_argument("--seed", type=int, help="seed for sampled verification points")
    common.add_argument("--config", help="JSON config file")

    sub = parser.add_subparsers(dest="command", required=True)

    family = sub.add_parser("family", parents=[common], help="tabulate a probability family")
    family.add_argument("kind", choices=["poisson", "binomial"])
    family.add_argument("--lambda", dest="lam", type=float, help="Poisson rate (alpha = sqrt(rate))")
    family.add_argument("--n", type=int, help="binomial trial count")
    family.add_argument("--p", type=float, help="binomial success probability in [0, 1)")

    infer = sub.add_parser("infer", parents=[common], help="tabulate an inferred posterior")
    infer.add_argument("kind", choices=["poisson", "binomial"])
    infer.add_argument("--observed", type=int, help="observed Poisson count")
    infer.add_argument("--n", type=int, help="binomial trial count")
    infer.add_argument("--k", type=int, help="observed binomial count")

    verify = sub.add_parser("verify", parents=[common], help="run residual checks")
    verify.add_argument("--check", required=True, help="ladder|bch|gauss|identity|translation|example12|all")
    verify.add_argument("--alpha", type=complex, default=1.0 + 0.0j, help="displacement for the bch check")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    code = 0
    try:
        if args.command == "family":
            if args.kind == "poisson":
                payload = _family_poisson(config, args.lam)
            else:
                payload = _family_binomial(config, args.n, args.p)
        elif args.command == "infer":
            if args.kind == "poisson":
                payload = _infer_poisson(config, args.observed)
            else:
                payload = _infer_binomial(config, args.n, args.k)
        else:
            payload, code = _cmd_verify(config, args.check, args.alpha)
    except (UsageError, fock.TruncationError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(payload, config)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
