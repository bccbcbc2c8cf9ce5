"""Command-line surface.

Subcommands: orbit, stability, certify, density, bound, galois, classify.
JSON reports share the schema {input, config, results, version}.  Exit
codes: 0 success, 1 usage or parse error, 2 inconclusive by budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import __version__
from .exactnum import DEFAULT_EFFORT, MR_BASE_SET, MR_EXTRA_ROUNDS
from .density import (
    PER_PRIME_HEADER,
    chebotarev_upper_bound,
    density_estimate,
)
from .orbits import certificate_scan, classify_prime, orbit_factor_table, verify_rigid_divisibility
from .parsing import PolyParseError, parse_poly
from .polys import QuadMap
from .stability import (
    EVENTUALLY_STABLE,
    INCONCLUSIVE,
    STABLE,
    family_classify,
    stability_scan,
)
from .treemodel import MAXIMAL, ORDER2, exact_process, sample_process

DEFAULT_SEED = 271828
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _quadmap(text: str) -> QuadMap:
    p = parse_poly(text)
    if p.degree != 2 or not p.is_monic():
        raise UsageError(f"--f must be a monic quadratic, got {text!r}")
    return QuadMap.from_poly(p)


def _config(args, **extra) -> dict:
    cfg = {
        "seed": getattr(args, "seed", DEFAULT_SEED),
        "effort": getattr(args, "effort", DEFAULT_EFFORT),
        "threads": getattr(args, "threads", 1),
        "format": args.format,
        "mr_base_set": list(MR_BASE_SET),
        "mr_extra_rounds": MR_EXTRA_ROUNDS,
    }
    cfg.update(extra)
    return cfg


def _emit(args, payload: dict) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.format == "text":
        _emit_text(payload)
    else:
        raise UsageError(f"unsupported format {args.format!r}")


def _emit_text(payload: dict, indent: int = 0) -> None:
    pad = "  " * indent
    for k, v in payload.items():
        if isinstance(v, dict):
            print(f"{pad}{k}:")
            _emit_text(v, indent + 1)
        elif isinstance(v, list):
            print(f"{pad}{k}:")
            for item in v:
                if isinstance(item, dict):
                    _emit_text(item, indent + 1)
                    print()
                else:
                    print(f"{pad}  {item}")
        else:
            print(f"{pad}{k}: {v}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_orbit(args) -> int:
    f = _quadmap(args.f)
    g = parse_poly(args.g) if args.g else None
    table = orbit_factor_table(f, g, args.depth, args.effort)
    entries = []
    for e in table:
        classifications = {}
        for p in sorted(e.numerator_factored.factors):
            if p == 2:
                classifications[p] = "excluded (p = 2)"
            else:
                classifications[p] = classify_prime(f, g, p).verdict
        entries.append(
            {
                "n": e.n,
                "value": str(e.value),
                "sign": e.numerator_factored.sign,
                "factors": {str(p): e for p, e in sorted(e.numerator_factored.factors.items())},
                "cofactor": str(e.numerator_factored.cofactor),
                "cofactor_status": e.numerator_factored.cofactor_status,
                "new_primes": sorted(e.new_primes),
                "classifications": classifications,
            }
        )
    _emit(
        args,
        {
            "input": {"f": args.f, "g": args.g or "x", "depth": args.depth},
            "config": _config(args),
            "results": {"entries": entries},
            "version": __version__,
        },
    )
    incomplete = any(e["cofactor_status"] not in ("unit",) for e in entries)
    return EXIT_INCONCLUSIVE if incomplete else EXIT_OK


def _cmd_stability(args) -> int:
    f = _quadmap(args.f)
    g = parse_poly(args.g) if args.g else None
    rep = stability_scan(f, g, args.depth)
    _emit(
        args,
        {
            "input": {"f": args.f, "g": args.g or "x", "depth": args.depth},
            "config": _config(args),
            "results": {
                "overall": rep.overall,
                "certified_depth": rep.certified_depth,
                "levels": [
                    {
                        "n": st.n,
                        "verdict": st.verdict,
                        "evidence": {k: str(v) for k, v in st.evidence.items()},
                        "factors": [str(u) for u in st.factors],
                    }
                    for st in rep.levels
                ],
            },
            "version": __version__,
        },
    )
    return EXIT_INCONCLUSIVE if rep.overall == INCONCLUSIVE else EXIT_OK


def _cmd_certify(args) -> int:
    f = _quadmap(args.f)
    g = parse_poly(args.g) if args.g else None
    scan = certificate_scan(f, g, args.depth, args.effort)
    rigid = verify_rigid_divisibility(f, g, max(args.depth, 2), args.effort)
    _emit(
        args,
        {
            "input": {"f": args.f, "g": args.g or "x", "depth": args.depth},
            "config": _config(args),
            "results": {
                "certified_levels": list(scan.certified_levels),
                "fraction": scan.fraction,
                "assumes_irreducible_tower": True,
                "levels": [
                    {
                        "n": r.n,
                        "status": r.status,
                        "witness": r.certificate.p if r.certificate else None,
                        "valuation": r.certificate.vp_at_n if r.certificate else None,
                        "budget_note": r.budget_note,
                    }
                    for r in scan.results
                ],
                "rigid_divisibility": {
                    "verified": rigid.verified,
                    "depth": rigid.depth,
                    "violations": [list(v) for v in rigid.violations],
                },
            },
            "version": __version__,
        },
    )
    budget_blocked = any(
        r.status == "none-found" and r.budget_note for r in scan.results
    )
    return EXIT_INCONCLUSIVE if budget_blocked else EXIT_OK


def _cmd_density(args) -> int:
    f = parse_poly(args.f)
    if f.degree < 1:
        raise UsageError("--f must be nonconstant")
    g = parse_poly(args.g) if args.g else None
    rep = density_estimate(
        f,
        args.a0,
        args.limit,
        g=g,
        threads=args.threads,
        collect=bool(args.per_prime),
        config=_config(args),
    )
    if args.per_prime:
        with open(args.per_prime, "w") as fh:
            fh.write(PER_PRIME_HEADER + "\n")
            for p, member, steps, lam in rep.per_prime:
                fh.write(f"{p},{member},{steps},{lam}\n")
    _emit(
        args,
        {
            "input": {"f": args.f, "g": args.g, "a0": args.a0, "limit": args.limit},
            "config": _config(args),
            "results": rep.as_dict(),
            "version": __version__,
        },
    )
    return EXIT_OK


def _cmd_bound(args) -> int:
    f = _quadmap(args.f)
    g = parse_poly(args.g) if args.g else None
    rep = chebotarev_upper_bound(f, g, args.depth, args.limit, config=_config(args))
    _emit(
        args,
        {
            "input": {"f": args.f, "g": args.g or "x", "depth": args.depth, "limit": args.limit},
            "config": _config(args),
            "results": {
                "primes_tested": rep.primes_tested,
                "fractions": [{"n": n, "fraction": fr} for n, fr in rep.fractions],
            },
            "version": __version__,
        },
    )
    return EXIT_OK


def _parse_mask(text: str, height: int):
    if not text:
        return None
    mask = []
    for ch in text:
        if ch in ("M", "m"):
            mask.append(MAXIMAL)
        elif ch in ("O", "o"):
            mask.append(ORDER2)
        else:
            raise UsageError(f"mask characters must be M or O, got {ch!r}")
    if len(mask) < height:
        raise UsageError("mask shorter than height")
    return tuple(mask)


def _cmd_galois(args) -> int:
    if args.mode in ("enumerate", "recursion"):
        stats = exact_process(args.height, "enumeration" if args.mode == "enumerate" else "recursion")
    elif args.mode == "sample":
        mask = _parse_mask(args.mask, args.height)
        stats = sample_process(args.height, args.trials, args.seed, mask)
    else:
        raise UsageError(f"unknown mode {args.mode!r}")
    _emit(
        args,
        {
            "input": {"mode": args.mode, "height": args.height, "mask": args.mask or None},
            "config": _config(args, trials=getattr(args, "trials", None)),
            "results": stats.as_dict(),
            "version": __version__,
        },
    )
    return EXIT_OK


def _cmd_classify(args) -> int:
    f = _quadmap(args.f)
    matches = family_classify(f)
    _emit(
        args,
        {
            "input": {"f": args.f},
            "config": _config(args),
            "results": {"families": [asdict(m) for m in matches]},
            "version": __version__,
        },
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    top = _Parser(prog="critorbit", description=__doc__)
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, g=True, depth=None, effort=False, seed=False):
        p.add_argument("--f", required=True, help="polynomial in x, e.g. 'x^2+5'")
        if g:
            p.add_argument("--g", default="", help="translate polynomial (default x)")
        if depth is not None:
            p.add_argument("--depth", type=int, default=depth)
        if effort:
            p.add_argument("--effort", type=int, default=DEFAULT_EFFORT,
                           help="factorization budget in Pollard-rho iterations")
        if seed:
            p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--format", choices=("json", "text"), default="json")

    p = sub.add_parser("orbit", help="translated critical-orbit factor table")
    common(p, depth=4, effort=True)
    p.set_defaults(fn=_cmd_orbit)

    p = sub.add_parser("stability", help="irreducibility of iterates")
    common(p, depth=6)
    p.set_defaults(fn=_cmd_stability)

    p = sub.add_parser("certify", help="maximality certificates and rigid divisibility")
    common(p, depth=4, effort=True)
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("density", help="prime-divisor density estimate")
    common(p, depth=None, seed=True)
    p.add_argument("--a0", type=int, required=True)
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--per-prime", default="", help="write per-prime CSV to this path")
    p.set_defaults(fn=_cmd_density)

    p = sub.add_parser("bound", help="Chebotarev-style upper bound via preimage trees")
    common(p, depth=4)
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(fn=_cmd_bound)

    p = sub.add_parser("galois", help="wreath-model process statistics")
    p.add_argument("--mode", choices=("enumerate", "recursion", "sample"), required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--mask", default="", help="per-level letters, M=maximal O=order2")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(fn=_cmd_galois)

    p = sub.add_parser("classify", help="density-zero family membership")
    common(p, g=False)
    p.set_defaults(fn=_cmd_classify)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PolyParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
