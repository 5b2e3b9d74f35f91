"""Command-line front end: ``interaural {joint,marginal,verify,synth,figure}``.

Exit codes: 0 success, 1 argument / parameter error, 2 verification
failure, 3 quadrature non-convergence.
"""
from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .export import fmt, write_columns_csv, write_grid_csv, write_grid_svg
from .marginals import DEFAULT_AXES, marginal_curve
from .montecarlo import histogram_1d
from .quadrature import QuadratureError
from .stimulus import GRID_SENTINEL, ParameterError, PdfGrid, StimulusParams, joint_grid
from .verify import run_verification
from .waveform import extract_cues, synthesize_waveform, write_wav

log = logging.getLogger("interaural")

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_QUADRATURE = 0, 1, 2, 3

# panel parameters behind each figure: (SNR dB, psi rad)
FIG2_PANELS = [(-10.0, math.pi), (0.0, math.pi / 2), (10.0, math.pi / 4)]
FIG3_SNRS = [-20.0, -10.0, -5.0, 0.0, 5.0, 10.0]
FIG3_PSIS = [math.pi, math.pi / 2]
FIG3_FIXED_SNRS = [-10.0, 0.0]
FIG3_PHASES = [math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi]
FIG4_PANELS = [(snr, psi) for psi in (math.pi / 2, math.pi) for snr in (-10.0, 0.0, 10.0)]
ORACLE_POINTS = [(-10.0, math.pi), (0.0, math.pi / 2)]

_ANGLE = re.compile(r"^([+-]?)(\d+(?:\.\d*)?|\.\d+)?(pi)?(?:/(\d+(?:\.\d*)?))?(deg|rad)$")


def parse_angle(text: str) -> float:
    """Angle with a mandatory unit: ``180deg``, ``pi/2rad``, ``-3pi/4rad``, ``1.57rad``."""
    m = _ANGLE.match(text.strip().replace(" ", ""))
    if not m or (m.group(2) is None and m.group(3) is None):
        raise argparse.ArgumentTypeError(
            f"bad angle {text!r}: use a unit suffix, e.g. 180deg or pi/2rad")
    sign, num, pi, den, unit = m.groups()
    if pi and unit == "deg":
        raise argparse.ArgumentTypeError(f"bad angle {text!r}: 'pi' needs the rad suffix")
    val = float(num) if num else 1.0
    if pi:
        val *= math.pi
    if den:
        val /= float(den)
    if unit == "deg":
        val = math.radians(val)
    return -val if sign == "-" else val


def parse_list(item_type):
    def parse(text: str):
        try:
            return [item_type(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    return parse


def parse_axis(text: str):
    """``lo:hi:n`` evenly spaced axis."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad axis {text!r}: expected lo:hi:n") from None
    if n < 2 or hi <= lo:
        raise argparse.ArgumentTypeError(f"bad axis {text!r}: need hi > lo and n >= 2")
    return np.linspace(lo, hi, n)


def column_name(snr_db: float, psi: float) -> str:
    return f"snr{snr_db:g}dB_psi{round(math.degrees(psi), 6):g}deg"


def _meta(params: StimulusParams | None = None, **extra) -> dict:
    meta = {"tool": "interaural", "version": __version__}
    if params is not None:
        # SNR is recovered from C, so round away the last-bit noise (and -0)
        meta.update(snr_db=fmt(round(params.snr_db, 12) + 0.0), psi_rad=fmt(params.tone_ipd_psi),
                    c=fmt(params.tone_amplitude_c), noise_variance=fmt(params.noise_variance))
    meta.update(extra)
    return meta


def _tag(snr_db: float, psi: float) -> str:
    return column_name(snr_db, psi).replace("-", "m").replace(".", "p")


# ---------------------------------------------------------------- joint

def normalized_pow_grid(params: StimulusParams, q_axis, phi_axis) -> PdfGrid:
    """(p', dphi) joint on a p'/C^2 axis, density per unit p'/C^2."""
    grid = joint_grid("pow-ipd", params, params.c2 * np.asarray(q_axis, float), phi_axis)
    vals = np.where(grid.defined, grid.values * params.c2, GRID_SENTINEL)
    return PdfGrid("p_over_c2", "dphi", q_axis, grid.axis2, vals, meta=grid.meta)


def make_joint(kind: str, params: StimulusParams, axis1=None, phi=None) -> PdfGrid:
    phi = np.linspace(-math.pi, math.pi, 181) if phi is None else phi
    if kind == "r-ipd":
        return joint_grid(kind, params, np.linspace(0.0, 10.0, 201) if axis1 is None else axis1,
                          phi)
    return normalized_pow_grid(params, np.linspace(0.0, 4.0, 161) if axis1 is None else axis1,
                               phi)


def cmd_joint(args) -> int:
    params = StimulusParams.from_snr_db(args.snr_db, args.psi)
    grid = make_joint(args.kind, params, args.axis1, args.phi_axis)
    write_grid_csv(args.out, grid, _meta(params, kind=args.kind))
    if args.svg:
        write_grid_svg(args.svg, grid, f"{args.kind} {column_name(args.snr_db, params.tone_ipd_psi)}")
    log.info("wrote %s", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- marginal

def marginal_table(which: str, combos, axis=None, pow_scale: str = "db") -> tuple[dict, str]:
    cols, unit = {}, ""
    for snr, psi in combos:
        curve = marginal_curve(which, StimulusParams.from_snr_db(snr, psi), axis,
                               pow_scale=pow_scale)
        if not cols:
            unit = curve.axis_unit
            cols["axis"] = curve.axis
        cols[column_name(snr, psi)] = curve.density
    return cols, unit


def cmd_marginal(args) -> int:
    combos = [(s, p) for s in args.snr_db for p in args.psi]
    cols, unit = marginal_table(args.which, combos, args.axis, args.pow_scale)
    write_columns_csv(args.out, cols, _meta(which=args.which, axis_unit=unit,
                                            noise_variance=fmt(1.0)))
    log.info("wrote %s", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- verify

def cmd_verify(args) -> int:
    if args.snr_db is None and args.psi is None:
        combos = ORACLE_POINTS
    else:
        snrs = args.snr_db or [p[0] for p in ORACLE_POINTS]
        psis = args.psi or [p[1] for p in ORACLE_POINTS]
        if args.zip:
            if len(snrs) != len(psis):
                raise ParameterError("--zip needs equally long SNR and psi lists")
            combos = list(zip(snrs, psis))
        else:
            combos = [(s, p) for s in snrs for p in psis]
    report = None
    for snr, psi in combos:
        part = run_verification([snr], [psi], samples=args.samples, seed=args.seed,
                                log=log.info)
        if report is None:
            report = part
        else:
            report.records.extend(part.records)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    for rec in report.records:
        if not rec.passed:
            log.warning("FAIL %s %s snr=%g psi=%.6g: %.3g > %.3g", rec.name, rec.metric,
                        rec.snr_db, rec.psi, rec.value, rec.threshold)
    return EXIT_OK if report.passed else EXIT_VERIFY


# ---------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    params = StimulusParams.from_snr_db(args.snr_db, args.psi)
    stim = synthesize_waveform(params, args.fs, args.f0, args.bandwidth, args.duration,
                               args.seed)
    if args.wav:
        write_wav(args.wav, stim)
        log.info("wrote %s", args.wav)
    if args.cues:
        tr = extract_cues(stim)
        sl = slice(None, None, args.decimate)
        write_columns_csv(args.cues, {"time_s": tr.time_s[sl], "ipd_rad": tr.ipd_rad[sl],
                                      "ild_db": tr.ild_db[sl], "p": tr.power_p[sl]},
                          _meta(params, seed=args.seed, fs_hz=fmt(args.fs), f0_hz=fmt(args.f0),
                                bandwidth_hz=fmt(args.bandwidth),
                                duration_s=fmt(args.duration), decimate=args.decimate))
        log.info("wrote %s", args.cues)
    return EXIT_OK


# ---------------------------------------------------------------- figure

def _hist_density(data, edges):
    h = histogram_1d(data, (edges[0], edges[-1]), edges.size - 1)
    return h.probabilities / np.diff(edges)


def _write_joint(out: Path, name: str, grid: PdfGrid, meta: dict, svg: bool):
    write_grid_csv(out / f"{name}.csv", grid, meta)
    if svg:
        write_grid_svg(out / f"{name}.svg", grid, name)


def figure_fig2(out: Path, seed: int, duration: float, svg: bool):
    """Joint densities per panel plus analytic marginals next to waveform histograms."""
    bins = {"ipd": np.linspace(-math.pi, math.pi, 181),
            "ild": np.linspace(-40.0, 40.0, 161),
            "pow": np.linspace(-40.0, 20.0, 121)}
    for snr, psi in FIG2_PANELS:
        params = StimulusParams.from_snr_db(snr, psi)
        tag = _tag(snr, psi)
        for kind in ("r-ipd", "pow-ipd"):
            _write_joint(out, f"fig2_{tag}_{kind}", make_joint(kind, params),
                         _meta(params, kind=kind), svg)
        stim = synthesize_waveform(params, duration_s=duration, seed=seed)
        tr = extract_cues(stim)
        observed = {"ipd": tr.ipd_rad, "ild": tr.ild_db,
                    "pow": 10.0 * np.log10(tr.power_p / params.c2)}
        for which, edges in bins.items():
            centers = 0.5 * (edges[1:] + edges[:-1])
            curve = marginal_curve(which, params, centers)
            write_columns_csv(out / f"fig2_{tag}_{which}.csv",
                              {"axis": centers, "analytic": curve.density,
                               "waveform": _hist_density(observed[which], edges)},
                              _meta(params, which=which, axis_unit=curve.axis_unit, seed=seed,
                                    duration_s=fmt(duration)))


def figure_fig3(out: Path):
    for which in ("ipd", "ild", "pow"):
        for psi in FIG3_PSIS:
            cols, unit = marginal_table(which, [(s, psi) for s in FIG3_SNRS])
            write_columns_csv(out / f"fig3_{which}_psi{round(math.degrees(psi)):d}deg.csv",
                              cols, _meta(which=which, axis_unit=unit))
        for snr in FIG3_FIXED_SNRS:
            cols, unit = marginal_table(which, [(snr, p) for p in FIG3_PHASES])
            write_columns_csv(out / f"fig3_{which}_snr{snr:g}dB.csv",
                              cols, _meta(which=which, axis_unit=unit))


def figure_fig4(out: Path, svg: bool):
    for snr, psi in FIG4_PANELS:
        params = StimulusParams.from_snr_db(snr, psi)
        meta = _meta(params, kind="pow-ipd", reference_p_over_c2=fmt(1.0),
                     reference_dphi=fmt(params.tone_ipd_psi))
        _write_joint(out, f"fig4_{_tag(snr, psi)}", make_joint("pow-ipd", params), meta, svg)


def cmd_figure(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.which == "fig2":
        figure_fig2(out, args.seed, args.duration, args.svg)
    elif args.which == "fig3":
        figure_fig3(out)
    else:
        figure_fig4(out, args.svg)
    log.info("wrote %s data to %s", args.which, out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="interaural", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"interaural {__version__}")
    ap.add_argument("-q", "--quiet", action="store_true", help="only report failures")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def stimulus(p):
        p.add_argument("--snr-db", type=float, required=True, help="SNR in dB (sigma^2 = 1)")
        p.add_argument("--psi", type=parse_angle, required=True,
                       help="tone IPD with unit, e.g. 180deg or pi/2rad")

    p = sub.add_parser("joint", help="joint density on a grid (CSV, optional SVG)")
    p.add_argument("kind", choices=["r-ipd", "pow-ipd"])
    stimulus(p)
    p.add_argument("--axis1", type=parse_axis, default=None,
                   help="r axis (default 0:10:201) or p'/C^2 axis (default 0:4:161)")
    p.add_argument("--phi-axis", type=parse_axis, default=None,
                   help="IPD axis in rad (default -pi..pi, 181 points)")
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None, help="also write a log-scaled heat map")
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("marginal", help="marginal curves, one column per (SNR, psi)")
    p.add_argument("which", choices=["ipd", "iar", "ild", "pow"])
    p.add_argument("--snr-db", type=parse_list(float), required=True, help="e.g. -10,0,10")
    p.add_argument("--psi", type=parse_list(parse_angle), required=True, help="e.g. 90deg,180deg")
    p.add_argument("--axis", type=parse_axis, default=None,
                   help="lo:hi:n (defaults: " + ", ".join(
                       f"{k} {lo:g}:{hi:g}:{n}" for k, (lo, hi, n) in DEFAULT_AXES.items()) + ")")
    p.add_argument("--pow-scale", choices=["db", "linear"], default="db",
                   help="axis of the pow marginal: p'/C^2 in dB or linear")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("verify", help="run the self-checks; exit 2 on failure")
    p.add_argument("--snr-db", type=parse_list(float), default=None)
    p.add_argument("--psi", type=parse_list(parse_angle), default=None)
    p.add_argument("--zip", action="store_true", help="pair SNR and psi lists element-wise")
    p.add_argument("--samples", type=int, default=10_000_000,
                   help="Monte-Carlo samples per combination (0 skips the oracle checks)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="synthesize a stimulus; write WAV and cue trace")
    stimulus(p)
    p.add_argument("--f0", type=float, default=500.0, help="tone / band centre in Hz")
    p.add_argument("--bandwidth", type=float, default=500.0, help="noise bandwidth in Hz")
    p.add_argument("--fs", type=float, default=48000.0, help="sample rate in Hz")
    p.add_argument("--duration", type=float, default=1.0, help="seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wav", default=None)
    p.add_argument("--cues", default=None, help="cue-trace CSV path")
    p.add_argument("--decimate", type=int, default=1, help="keep every n-th cue sample")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("figure", help="CSV data for the joint (fig2, fig4) and marginal (fig3) figures")
    p.add_argument("which", choices=["fig2", "fig3", "fig4"])
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0, help="waveform seed (fig2)")
    p.add_argument("--duration", type=float, default=10.0, help="waveform seconds (fig2)")
    p.add_argument("--svg", action="store_true", help="also write heat maps of joint grids")
    p.set_defaults(func=cmd_figure)
    return ap


_VALUE_FLAGS = ("--snr-db", "--psi", "--axis", "--axis1", "--phi-axis")
_NEGATIVE = re.compile(r"^-[\d.p]")


def _attach_negative_values(argv):
    """``--snr-db -10,0`` -> ``--snr-db=-10,0``; argparse would read the value
    as an option because it is not a plain negative number."""
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and _NEGATIVE.match(nxt):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_values(argv))
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    if getattr(args, "samples", 0) < 0 or getattr(args, "decimate", 1) < 1:
        print("interaural: error: counts must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except QuadratureError as exc:
        print(f"interaural: quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except ParameterError as exc:
        print(f"interaural: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
