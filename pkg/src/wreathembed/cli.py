"""Command-line front end: ``wreathembed {inspect,embed,verify,oracle,report}``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__, finite
from .certify import DEFAULT_SAMPLES, CheckResult, EmbeddingCertificate, verify_witness
from .embedder import THEOREMS, build_witness, route_domain_points, witness_dump
from .errors import CapacityError, WreathEmbedError
from .groups import element_order
from .seqtools import is_strictly_uneven
from .specfile import load_group

LARGE_DOMAIN = 10**6
BYTES_PER_POINT = 4  # int32 element codes
DENSE_BUFFERS = 8  # generous count of simultaneously live dense arrays
DEFAULT_WINDOW = {"1": 16, "3": 8}

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(WreathEmbedError):
    pass


def _out(text, path=None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# -- inspect -----------------------------------------------------------------

def inspect_report(data) -> str:
    G = data.group
    lines = [f"group: {data.name}", f"backend: {G.backend}", f"generators: {len(G.generators)}"]
    for n, g in zip(G.names, G.generators):
        try:
            order = element_order(G, g, bound=1000)
        except WreathEmbedError:
            order = "infinite (not detected within 1000 powers)"
        lines.append(f"  {n} = {G.format(g)}   order {order}")
    if G.is_finite:
        elements = finite.group_elements(G)
        dl = data.derived_length
        lines.append(f"order: {len(elements)}")
        lines.append(f"derived length: {dl if dl is not None else 'not solvable'}")
        lines.append(f"abelianization: {_abelian_text(data)}")
        lines.append(f"exponent: {finite.exponent(G)}")
    else:
        lines.append("order: infinite backend")
        dl = data.derived_length
        lines.append(f"derived length (declared): {dl if dl is not None else 'not declared'}")
        lines.append(f"abelianization (declared): {_abelian_text(data)}; free rank {len(data.free)}")
    if data.presentation is not None:
        lines.append(f"presentation: {len(data.presentation.relators)} relators")
    return "\n".join(lines) + "\n"


def _abelian_text(data):
    parts = ["Z"] * len(data.free) + [f"Z{l}" for _, l in data.torsion if l > 1]
    return " x ".join(parts) if parts else "trivial"


# -- embed / verify ------------------------------------------------------------

def _box(theorem, window):
    if theorem not in DEFAULT_WINDOW:
        return None
    n = window if window is not None else DEFAULT_WINDOW[theorem]
    if n < 1:
        raise UsageError("--window must be positive")
    dims = 1 if theorem == "1" else 3
    return ((-n, n),) * dims


def _guard_large(theorem, data, allow_large):
    points = route_domain_points(theorem, data)
    if points is None:
        return
    estimate = points * BYTES_PER_POINT * DENSE_BUFFERS
    if points > LARGE_DOMAIN:
        print(f"domain: {points} points; dense storage estimate up to {estimate / 2**20:.1f} MiB",
              file=sys.stderr)
        if not allow_large:
            raise UsageError(f"domain of {points} points exceeds {LARGE_DOMAIN}; rerun with --allow-large")


def run_embed(args):
    data = load_group(args.input, args.max_closure)
    theorem = args.theorem
    box = _box(theorem, args.window)
    if theorem in ("5", "cor6") and not data.group.is_finite:
        raise UsageError("finite orders required: --theorem 5 and cor6 need a finite group backend")
    _guard_large(theorem, data, args.allow_large)
    try:
        w = build_witness(theorem, data, box=box)
    except CapacityError as exc:
        hint = " (the exponent route --theorem cor6 uses a different c-axis order)" if theorem == "5" else ""
        raise UsageError(f"{exc}{hint}") from None
    if args.dump:
        Path(args.dump).write_text(witness_dump(w))
    cert = verify_witness(w, box=box, seed=args.seed, samples=args.samples)
    return cert


def cmd_embed(args):
    start = time.perf_counter()
    cert = run_embed(args)
    _out(cert.to_json(), args.out)
    print(summary(cert, time.perf_counter() - start), file=sys.stderr if not args.out else sys.stdout, end="")
    return EXIT_PASS if cert.passed else EXIT_FAIL


def cmd_verify(args):
    """Rebuild, re-verify and compare with a stored certificate."""
    stored = Path(args.certificate).read_text()
    try:
        old = json.loads(stored)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.certificate}: not a certificate ({exc.msg} at line {exc.lineno})") from None
    args.theorem = args.theorem or old.get("route")
    if args.seed is None:
        args.seed = old.get("seed", 0)
    if args.window is None and old.get("mode", {}).get("kind") == "window":
        args.window = old["mode"]["box"][0][1]
    cert = run_embed(args)
    fresh = cert.to_json()
    same = fresh == stored
    print(f"certificate {'reproduced byte for byte' if same else 'differs from the stored one'}")
    print(summary(cert), end="")
    return EXIT_PASS if same and cert.passed else EXIT_FAIL


# -- oracle --------------------------------------------------------------------

def cmd_oracle(args):
    if args.oracle == "uneven":
        res = is_strictly_uneven(args.terms, args.modulus)
        if res:
            print("uneven: yes")
            return EXIT_PASS
        i, j, k, l = res.witness
        s = (None,) + tuple(args.terms)
        mod = f" (mod {args.modulus})" if args.modulus else ""
        print(f"uneven: no\ncounterexample (i, j, k, l) = ({i}, {j}, {k}, {l}): "
              f"s_{i + j} - s_{j} = {s[i + j] - s[j]}, s_{k + l} - s_{l} = {s[k + l] - s[l]}{mod}")
        return EXIT_FAIL
    data = load_group(args.group, args.max_closure)
    G = data.group
    if args.oracle == "derived":
        series = finite.derived_series(G, args.max_closure)
        for i, term in enumerate(series):
            print(f"G^({i}): {len(term)} elements")
        dl = finite.derived_length(G, args.max_closure)
        print(f"derived length: {dl if dl is not None else 'not solvable'}")
        return EXIT_PASS
    # decompose
    g = G.element(args.element)
    dec = finite.commutator_decomposition_oracle(G, g, args.max_closure)
    print(f"{G.format(g)} = product of {dec.length} commutator{'s' if dec.length != 1 else ''}")
    for u, v in dec.factors:
        print(f"  [{G.format(u)}, {G.format(v)}]")
    return EXIT_PASS


# -- report ----------------------------------------------------------------------

def summary(cert: EmbeddingCertificate, seconds=None) -> str:
    lines = [f"{cert.group} via route {cert.route}: {cert.verdict_label}"]
    for c in cert.checks:
        lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}: {c.detail}")
        if c.counterexample:
            lines.append(f"         counterexample: {json.dumps(c.counterexample)}")
    st = cert.statistics
    if "domain_points" in st:
        lines.append(f"  domain: {st['domain_points']} points ({st.get('active_group')})")
    elif "window_points" in st:
        lines.append(f"  window: {st['window_points']} points of {st.get('active_group')}")
    if st.get("derived_length_G") is not None:
        lines.append(f"  derived length: G = {st['derived_length_G']}, H <= {st['derived_length_H_bound']}")
    if seconds is not None:
        lines.append(f"  time: {seconds:.2f} s")
    return "\n".join(lines) + "\n"


def cmd_report(args):
    try:
        raw = json.loads(Path(args.certificate).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.certificate}: not a certificate ({exc.msg} at line {exc.lineno})") from None
    try:
        checks = [CheckResult(c["name"], c["passed"], c.get("detail", ""), c.get("counterexample"))
                  for c in raw["checks"]]
        cert = EmbeddingCertificate(raw["group"], raw["route"], raw["input_sha256"], raw["mode"], checks,
                                    raw.get("statistics", {}), raw.get("seed", 0))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.certificate}: certificate lacks field {exc}") from None
    print(summary(cert), end="")
    st = cert.statistics
    if st.get("recovery_words"):
        print("  recovery words:")
        for r in st["recovery_words"]:
            print(f"    {r['label']} = {r['term']}")
    if st.get("support_slots"):
        print(f"  support slots: {json.dumps(st['support_slots'])}")
    return EXIT_PASS if cert.passed else EXIT_FAIL


# -- parser ----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="wreathembed", description=__doc__)
    p.add_argument("--version", action="version", version=f"wreathembed {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--max-closure", type=int, default=finite.DEFAULT_CLOSURE_BOUND,
                        help="bound on enumerated group elements")

    sp = sub.add_parser("inspect", help="describe a group spec")
    sp.add_argument("input", help="spec file or catalogue name (S3, D4, Q8, Z2xZ2, Heisenberg, ...)")
    common(sp)

    for name, helptext in (("embed", "build and verify an embedding"),
                           ("verify", "rebuild and compare with a stored certificate")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("input")
        sp.add_argument("--theorem", choices=THEOREMS, required=name == "embed")
        sp.add_argument("--window", type=int, default=None, help="box radius on infinite axes")
        sp.add_argument("--seed", type=int, default=0 if name == "embed" else None)
        sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        sp.add_argument("--allow-large", action="store_true", help=f"permit domains over {LARGE_DOMAIN} points")
        sp.add_argument("--out", help="certificate path (default: stdout)")
        if name == "embed":
            sp.add_argument("--dump", help="write the support of d to this path")
        else:
            sp.add_argument("certificate")
            sp.set_defaults(dump=None)
        common(sp)

    sp = sub.add_parser("oracle", help="standalone oracles")
    osub = sp.add_subparsers(dest="oracle", required=True)
    o = osub.add_parser("uneven", help="exhaustive unevenness check")
    o.add_argument("terms", type=int, nargs="+")
    o.add_argument("--modulus", type=int)
    o = osub.add_parser("decompose", help="shortest commutator product for an element of G'")
    o.add_argument("group")
    o.add_argument("element", help="cycle notation, table index/label or exponent")
    common(o)
    o = osub.add_parser("derived", help="derived series")
    o.add_argument("group")
    common(o)

    sp = sub.add_parser("report", help="summarize a certificate")
    sp.add_argument("certificate")
    return p


COMMANDS = {
    "inspect": lambda a: (print(inspect_report(load_group(a.input, a.max_closure)), end=""), EXIT_PASS)[1],
    "embed": cmd_embed,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "report": cmd_report,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (WreathEmbedError, OSError) as exc:
        msg = exc.strerror if isinstance(exc, OSError) and exc.strerror else str(exc)
        if isinstance(exc, OSError) and exc.filename:
            msg = f"{exc.filename}: {msg}"
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
