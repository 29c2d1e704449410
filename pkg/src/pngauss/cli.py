"""Command-line interface: generation, analysis, bound checks, reproduction.

Exit codes are a stable contract: 0 success, 1 configuration error,
2 verification failure, 3 I/O error.  All commands are deterministic
functions of their configuration; no wall clock, no ambient randomness.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__, analysis, bounds, figures, galois, grng, lfsr, sequences

SEED_OVERRIDE_ENV = "PNGAUSS_SEED_OVERRIDE"

DEFAULT_POLY1 = galois.POLY_89_TRINOMIAL
DEFAULT_POLY2 = galois.POLY_89_PENTANOMIAL

#: bundled reference moments (orders 1-4) for the four stock configurations
REFERENCE_MOMENTS = {
    "m-sequence/binary": (0.0037, 1.0043, 0.3609, 3.2182),
    "gold/binary": (-0.0012, 1.0011, 0.0049, 3.0061),
    "m-sequence/tausworthe": (0.0003, 1.0033, 0.0031, 2.8849),
    "gold/tausworthe": (0.0018, 0.9992, 0.0022, 2.8421),
}


class ConfigError(ValueError):
    """Bad configuration; maps to exit code 1."""


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to regenerate a sample file bit for bit."""

    family: str
    model: str
    poly: str
    seed: str
    T: int
    poly2: str | None = None
    seed2: str | None = None
    r: int = 1
    M: int | None = None
    B: int | None = None
    terms: int | None = None
    start_offset: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)


def _atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write(path: str, writer) -> None:
    """Run ``writer(tmp_path)`` then rename into place.

    The temp file keeps the target's suffix so format-sniffing writers
    (matplotlib in particular) do the right thing.
    """
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-",
                               suffix=os.path.splitext(path)[1])
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_poly(text: str) -> galois.BinaryPolynomial:
    try:
        return galois.parse_polynomial(text)
    except ValueError as e:
        raise ConfigError(str(e))


def _resolve_seed(arg: str | None, poly: galois.BinaryPolynomial) -> lfsr.LfsrState:
    """Explicit flag wins; then the env override; then the all-ones default."""
    text = arg
    if text is None:
        text = os.environ.get(SEED_OVERRIDE_ENV)
    if text is None:
        return lfsr.default_state(poly)
    try:
        return lfsr.state_from_hex(text, poly)
    except ValueError as e:
        raise ConfigError(f"bad seed {text!r}: {e}")


def _build_config(args) -> RunConfig:
    family = args.family
    model = args.model
    if family not in ("m-sequence", "gold"):
        raise ConfigError(f"unknown family {args.family!r}")
    if model not in ("binary", "tausworthe"):
        raise ConfigError(f"unknown model {args.model!r}")
    if args.T < 1:
        raise ConfigError("--T must be positive")

    poly = _parse_poly(args.poly) if args.poly else DEFAULT_POLY1
    poly2 = None
    if family == "gold":
        if args.poly2:
            poly2 = _parse_poly(args.poly2)
        elif args.poly is None:
            poly2 = DEFAULT_POLY2
        else:
            if poly.degree > galois.MAX_VERIFIED_DEGREE:
                raise ConfigError(
                    "--poly2 is required for a gold family at degrees beyond "
                    f"{galois.MAX_VERIFIED_DEGREE}"
                )
            try:
                poly2 = sequences.preferred_partner(poly, r=args.r)
            except ValueError as e:
                raise ConfigError(str(e))
    seed = _resolve_seed(args.seed, poly)
    seed2 = _resolve_seed(args.seed2, poly2) if poly2 is not None else None
    return RunConfig(
        family=family,
        model=model,
        poly=str(poly),
        poly2=None if poly2 is None else str(poly2),
        seed=seed.to_hex(),
        seed2=None if seed2 is None else seed2.to_hex(),
        r=args.r,
        M=args.M if model == "binary" else None,
        B=args.B if model == "tausworthe" else None,
        terms=args.terms if model == "tausworthe" else None,
        T=args.T,
        start_offset=args.offset,
    )


def _build_sequence(cfg: RunConfig, length: int) -> sequences.BipolarSequence:
    poly = _parse_poly(cfg.poly)
    seed = lfsr.state_from_hex(cfg.seed, poly)
    try:
        if cfg.family == "m-sequence":
            return sequences.m_sequence(poly, seed=seed, length=length)
        poly2 = _parse_poly(cfg.poly2)
        seed2 = lfsr.state_from_hex(cfg.seed2, poly2)
        return sequences.gold_code(poly, poly2, seed1=seed, seed2=seed2, length=length)
    except (ValueError, galois.UnsupportedDegreeError) as e:
        raise ConfigError(str(e))


def generate_samples(cfg: RunConfig) -> grng.GaussianSampleBlock:
    """Produce the configured sample block (shared by generate and reproduce)."""
    if cfg.model == "binary":
        length = cfg.start_offset + cfg.T * cfg.M
        seq = _build_sequence(cfg, length)
        try:
            bcfg = grng.BlockSumConfig(M=cfg.M, source=seq, start_offset=cfg.start_offset)
        except ValueError as e:
            raise ConfigError(str(e))
        return grng.block_sum_gaussian(bcfg, cfg.T)
    if cfg.start_offset:
        raise ConfigError("--offset is only meaningful for the binary model")
    seq = _build_sequence(cfg, cfg.T * cfg.terms * cfg.B)
    try:
        tcfg = grng.TauswortheConfig(B=cfg.B, terms=cfg.terms, source=seq)
    except ValueError as e:
        raise ConfigError(str(e))
    return grng.tausworthe_gaussian(tcfg, cfg.T)


def _sidecar_path(samples_path: str) -> str:
    return samples_path + ".meta.json"


def _seeds_of(cfg: RunConfig) -> dict:
    seeds = {"seed": cfg.seed}
    if cfg.seed2 is not None:
        seeds["seed2"] = cfg.seed2
    return seeds


def cmd_generate(args) -> int:
    cfg = _build_config(args)
    if not args.out:
        raise ConfigError("--out is required")
    fmt = args.format or ("bin" if args.out.endswith(".bin") else "csv")
    if fmt not in ("csv", "bin"):
        raise ConfigError(f"generate supports --format csv or bin, not {fmt!r}")
    block = generate_samples(cfg)
    if fmt == "csv":
        _atomic_write(args.out, lambda p: grng.write_samples_csv(block.samples, p))
    else:
        _atomic_write(args.out, lambda p: grng.write_samples_bin(block.samples, p))
    sidecar = {
        "tool": "pngauss",
        "version": __version__,
        "samples_file": os.path.basename(args.out),
        "format": fmt,
        "count": cfg.T,
        "run_config": cfg.to_dict(),
    }
    _atomic_write_text(_sidecar_path(args.out), _json_dumps(sidecar))
    print(f"wrote {cfg.T} samples to {args.out} ({cfg.family}/{cfg.model})")
    return 0


def _read_samples(path: str, fmt: str | None) -> np.ndarray:
    if fmt is None:
        fmt = "bin" if path.endswith(".bin") else "csv"
    try:
        if fmt == "bin":
            return grng.read_samples_bin(path)
        return grng.read_samples_csv(path)
    except FileNotFoundError:
        raise
    except ValueError as e:
        raise OSError(str(e))


def load_run_config(samples_path: str) -> RunConfig | None:
    sidecar = _sidecar_path(samples_path)
    if not os.path.exists(sidecar):
        return None
    with open(sidecar) as fh:
        data = json.load(fh)
    return RunConfig.from_dict(data["run_config"])


def cmd_analyze(args) -> int:
    samples = _read_samples(args.input, args.format if args.format != "json" else None)
    cfg = load_run_config(args.input)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    do_moments = args.moments or not (args.histogram or args.triple_grid)
    wrote = []

    if do_moments:
        t = args.T or samples.size
        if t > samples.size:
            raise ConfigError(f"--T {t} exceeds the {samples.size} samples on file")
        report = analysis.raw_moments(samples[:t], k_max=4)
        payload = {
            "model": None if cfg is None else cfg.model,
            "family": None if cfg is None else cfg.family,
            "M": None if cfg is None else cfg.M,
            "T": report.T,
            "moments": list(report.moments),
            "seeds": None if cfg is None else _seeds_of(cfg),
        }
        if cfg is not None and cfg.model == "tausworthe":
            payload["B"] = cfg.B
            payload["terms"] = cfg.terms
        path = os.path.join(out_dir, "moments.json")
        _atomic_write_text(path, _json_dumps(payload))
        wrote.append(path)

    if args.histogram:
        data = samples if args.T is None else samples[:args.T]
        hist = analysis.histogram(data, bins=args.bins,
                                  value_range=(args.range[0], args.range[1]))
        path = os.path.join(out_dir, "histogram.csv")
        _atomic_write(path, lambda p: analysis.histogram_to_csv(hist, p))
        wrote.append(path)
        if args.figures:
            png = os.path.join(out_dir, "histogram.png")
            _atomic_write(png, lambda p: figures.render_histogram(hist, p))
            wrote.append(png)

    if args.triple_grid:
        window = args.window
        t = args.T or (samples.size - window + 1)
        try:
            grid = analysis.triple_moment_grid(samples, window, T=t)
        except ValueError as e:
            raise ConfigError(str(e))
        path = os.path.join(out_dir, "triple_grid.csv")
        _atomic_write(path, lambda p: analysis.grid_to_csv(grid, p))
        wrote.append(path)
        if args.figures:
            png = os.path.join(out_dir, "triple_grid.png")
            _atomic_write(png, lambda p: figures.render_grid(grid, p))
            wrote.append(png)
        floor = analysis.NOISE_FACTOR / math.sqrt(grid.T)
        peaks = int(np.count_nonzero(np.abs(grid.values) > floor))
        print(f"grid max |c| = {grid.max_abs():.6f}; "
              f"{peaks} cells above the {floor:.6f} noise floor")

    for path in wrote:
        print(f"wrote {path}")
    return 0


def cmd_verify_bounds(args) -> int:
    ks = tuple(args.k) if args.k else (1, 2, 3)
    Ms = tuple(args.M_list) if args.M_list else (2, 4, 8)
    if args.n:
        mseq_degrees = tuple(n for n in args.n)
        gold_degrees = tuple(n for n in args.n if n % 2 == 1)
    else:
        mseq_degrees = bounds.MSEQ_SWEEP_DEGREES
        gold_degrees = bounds.GOLD_SWEEP_DEGREES
    for n in mseq_degrees:
        period = (1 << n) - 1
        cap = 64 if max(ks) <= 3 else 32
        if args.mode == "exact" and period > cap:
            raise ConfigError(
                f"exact correlation search is infeasible at n = {n} "
                f"(period {period} > {cap}); rerun with --mode assumed or use "
                "the restricted estimator from the library"
            )

    reports = bounds.block_moment_sweep(
        ks=ks, Ms=Ms, mseq_degrees=mseq_degrees, gold_degrees=gold_degrees,
        theta_override=args.theta_override,
    )
    if not args.skip_large:
        reports += bounds.product_moment_check()
        reports.append(bounds.full_peak_probe())

    payload = [r.to_json_dict() for r in reports]
    if args.out:
        _atomic_write_text(args.out, _json_dumps(payload))
        print(f"wrote {args.out}")
    violations = [r for r in reports if not r.satisfied]
    for r in reports:
        tag = "ok " if r.satisfied else "VIOLATED"
        print(f"{tag} {r.theorem} {r.parameters}")
    print(f"{len(reports)} checks, {len(violations)} violations")
    return 2 if violations else 0


def _match_flags(key: str, measured) -> list[bool | None]:
    m1, m2, m3, m4 = measured
    if key == "m-sequence/binary":
        return [abs(m1) < 0.02, abs(m2 - 1) < 0.02, m3 > 0.2, m4 > 3.1]
    if key == "gold/binary":
        return [abs(m1) < 0.02, abs(m2 - 1) < 0.02, abs(m3) < 0.03, abs(m4 - 3) < 0.1]
    # the uniform-sum models carry a tolerance only for the fourth moment
    return [None, None, None, abs(m4 - 2.85) < 0.08]


def cmd_reproduce(args) -> int:
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    results = {}
    histograms = []
    seeds_echo = {}
    for family in ("m-sequence", "gold"):
        for model in ("binary", "tausworthe"):
            ns = argparse.Namespace(
                family=family, model=model, poly=None, poly2=None,
                seed=args.seed, seed2=args.seed2, r=1, M=args.M, B=args.B,
                terms=args.terms, T=args.T, offset=0,
            )
            cfg = _build_config(ns)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                block = generate_samples(cfg)
            report = analysis.raw_moments(block.samples, k_max=4)
            key = f"{family}/{model}"
            results[key] = {
                "measured": list(report.moments),
                "reference": list(REFERENCE_MOMENTS[key]),
                "match": _match_flags(key, report.moments),
            }
            seeds_echo[key] = _seeds_of(cfg)
            histograms.append((key, analysis.histogram(block.samples)))

    payload = {
        "T": args.T,
        "M": args.M,
        "B": args.B,
        "terms": args.terms,
        "polynomials": {"poly": str(DEFAULT_POLY1), "poly2": str(DEFAULT_POLY2)},
        "seeds": seeds_echo,
        "results": results,
    }
    json_path = os.path.join(out_dir, "moment_comparison.json")
    _atomic_write_text(json_path, _json_dumps(payload))

    lines = ["config,k,measured,reference,match"]
    for key, r in results.items():
        for i in range(4):
            flag = r["match"][i]
            flag_txt = "" if flag is None else str(flag).lower()
            lines.append(
                f"{key},{i + 1},{r['measured'][i]:.17g},{r['reference'][i]},{flag_txt}"
            )
    csv_path = os.path.join(out_dir, "moment_comparison.csv")
    _atomic_write_text(csv_path, "\n".join(lines) + "\n")

    png_path = os.path.join(out_dir, "histograms.png")
    if args.figures:
        _atomic_write(png_path, lambda p: figures.render_histogram_panel(histograms, p))

    print(f"wrote {json_path}")
    print(f"wrote {csv_path}")
    if args.figures:
        print(f"wrote {png_path}")
    for key, r in results.items():
        flags = ["-" if f is None else ("ok" if f else "MISMATCH") for f in r["match"]]
        measured = ", ".join(f"{v:.4f}" for v in r["measured"])
        print(f"{key:24s} moments [{measured}]  flags {flags}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pngauss", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pngauss {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate Gaussian samples")
    gen.add_argument("--family", default="m-sequence", choices=["m-sequence", "gold"])
    gen.add_argument("--model", default="binary", choices=["binary", "tausworthe"])
    gen.add_argument("--poly", help="characteristic polynomial (hex mask or x^k terms)")
    gen.add_argument("--poly2", help="second polynomial for the gold family")
    gen.add_argument("--seed", help="seed as hex register state (default: all ones)")
    gen.add_argument("--seed2", help="seed of the second register")
    gen.add_argument("--r", type=int, default=1, help="decimation parameter")
    gen.add_argument("--M", type=int, default=256, help="block length (binary model)")
    gen.add_argument("--B", type=int, default=32, help="bit depth (tausworthe model)")
    gen.add_argument("--terms", type=int, default=8, help="uniforms per sample")
    gen.add_argument("--T", type=int, default=100_000, help="sample count")
    gen.add_argument("--offset", type=int, default=0, help="symbols skipped up front")
    gen.add_argument("--out", required=True, help="samples file to write")
    gen.add_argument("--format", choices=["csv", "bin", "json"])
    gen.set_defaults(func=cmd_generate)

    ana = sub.add_parser("analyze", help="compute reports from a samples file")
    ana.add_argument("input", help="samples file (.csv or .bin, sidecar honoured)")
    ana.add_argument("--moments", action="store_true")
    ana.add_argument("--histogram", action="store_true")
    ana.add_argument("--triple-grid", action="store_true")
    ana.add_argument("--bins", type=int, default=100)
    ana.add_argument("--window", type=int, default=100)
    ana.add_argument("--range", type=float, nargs=2, default=(-5.0, 5.0))
    ana.add_argument("--T", type=int)
    ana.add_argument("--format", choices=["csv", "bin", "json"])
    ana.add_argument("--out", help="output directory (default: current)")
    ana.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    ana.set_defaults(func=cmd_analyze)

    ver = sub.add_parser("verify-bounds", help="check analytic bounds against data")
    ver.add_argument("--n", type=int, nargs="*", help="degrees for the sweep")
    ver.add_argument("--k", type=int, nargs="*", help="moment orders")
    ver.add_argument("--M", dest="M_list", type=int, nargs="*", help="block lengths")
    ver.add_argument("--mode", choices=["exact", "assumed"], default="exact")
    ver.add_argument("--theta-override", type=float,
                     help="force this correlation value into the bound (testing)")
    ver.add_argument("--skip-large", action="store_true",
                     help="skip the degree-13 product-moment check and peak probe")
    ver.add_argument("--out", help="JSON report path")
    ver.set_defaults(func=cmd_verify_bounds)

    rep = sub.add_parser("reproduce",
                         help="run the four stock configurations and compare "
                              "moments against the bundled reference values")
    rep.add_argument("--T", type=int, default=100_000)
    rep.add_argument("--M", type=int, default=256)
    rep.add_argument("--B", type=int, default=32)
    rep.add_argument("--terms", type=int, default=8)
    rep.add_argument("--seed", help="seed for the first register (hex)")
    rep.add_argument("--seed2", help="seed for the second register (hex)")
    rep.add_argument("--out", help="output directory (default: current)")
    rep.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, sequences.InsufficientSourceError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
