"""Verification of embedding witnesses into deterministic certificates."""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from . import __version__, finite
from .embedder import EmbeddingWitness, GroupData, build_witness
from .errors import WreathEmbedError
from .words import Word, evaluate

DEFAULT_SAMPLES = 100
DEFAULT_WORD_LENGTH = 8
DEFAULT_AUDIT_WORDS = 50
CHECK_NAMES = (
    "recovery_values",
    "relators",
    "injectivity",
    "variety",
    "generator_count",
    "exponent_sum_audit",
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    counterexample: dict | None = None

    def as_dict(self):
        out = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class EmbeddingCertificate:
    group: str
    route: str
    input_sha256: str
    mode: dict
    checks: list = field(default_factory=list)
    statistics: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def verdict_label(self) -> str:
        if not self.passed:
            failed = ", ".join(c.name for c in self.checks if not c.passed)
            return f"fail ({failed})"
        if self.mode["kind"] == "exact":
            return "pass (exact)"
        return f"pass (window-verified at box {self.mode['box']})"

    def check(self, name) -> CheckResult | None:
        return next((c for c in self.checks if c.name == name), None)

    def as_dict(self) -> dict:
        return {
            "tool": "wreathembed",
            "version": __version__,
            "group": self.group,
            "route": self.route,
            "input_sha256": self.input_sha256,
            "mode": self.mode,
            "verdict": self.verdict,
            "verdict_label": self.verdict_label,
            "checks": [c.as_dict() for c in self.checks],
            "statistics": self.statistics,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + "\n"


def fingerprint(data: GroupData) -> str:
    if data.fingerprint:
        return data.fingerprint
    G = data.group
    text = "\n".join([data.name, G.backend] + [f"{n}={G.format(g)}" for n, g in zip(G.names, G.generators)])
    return hashlib.sha256(text.encode()).hexdigest()


def _fmt(G, g):
    return G.format(g)


def _point(W, diff):
    if diff is None:
        return None
    if diff[0] == "active":
        return {"active_part": list(diff[1]), "expected_active_part": list(diff[2])}
    return {"point": list(diff[1])}


# -- individual checks -----------------------------------------------------

def check_recovery_values(w: EmbeddingWitness, box=None) -> CheckResult:
    W, G = w.W, w.data.group
    env = w.env()
    for r in w.recovery:
        got = evaluate(r.term, W, env)
        diff = W.first_difference(got, r.expected, box)
        if diff is not None:
            ce = {"word": r.label, "term": str(r.term), **_point(W, diff)}
            if diff[0] == "base":
                p = diff[1]
                ce["value"] = _fmt(G, got.base.eval(p))
                ce["expected"] = _fmt(G, r.expected.base.eval(p))
            return CheckResult("recovery_values", False, f"{r.label} differs from its planned value", ce)
    return CheckResult("recovery_values", True, f"{len(w.recovery)} recovery words match their planned values")


def recovered_generators(w: EmbeddingWitness) -> list:
    env = w.env()
    return [evaluate(t, w.W, env) for t in w.generator_words]


def check_relators(w: EmbeddingWitness, images, presentation=None, bound=finite.DEFAULT_CLOSURE_BOUND) -> CheckResult:
    G = w.data.group
    P = presentation or w.data.presentation
    source = "declared presentation"
    if P is None:
        if not G.is_finite:
            return CheckResult("relators", False, "no presentation declared for an infinite group")
        P = finite.multiplication_table_presentation(G, bound)
        source = "multiplication-table presentation"
    bad = finite.first_failing_relator(P, images, w.W)
    if bad is not None:
        rel = P.relators[bad].format(G.names)
        return CheckResult("relators", False, f"relator {bad} fails on the recovered generators", {"relator": rel})
    return CheckResult("relators", True, f"{len(P.relators)} relators of the {source} hold")


def check_injectivity(w: EmbeddingWitness, images, bound=finite.DEFAULT_CLOSURE_BOUND) -> CheckResult:
    W, G = w.W, w.data.group
    for name, g, img in zip(G.names, G.generators, images):
        if not W.is_base(img):
            return CheckResult("injectivity", False, f"image of {name} is not a base element",
                               {"generator": name, "active_part": list(img.active)})
        got = W.project_at_identity(img)
        if got != g:
            return CheckResult("injectivity", False, f"projection does not return {name}",
                               {"generator": name, "value": _fmt(G, got), "expected": _fmt(G, g)})
    detail = f"projection at the identity point inverts all {len(images)} generator images"
    if G.is_finite:
        words = finite.canonical_words(G, bound)
        elements = list(words)
        R = {g: Word.from_letters(words[g]).evaluate(W, images) for g in elements}
        for g in elements:
            for h in elements:
                if not W.eq(W.mul(R[g], R[h]), R[G._mul(g, h)]):
                    return CheckResult("injectivity", False, "R(g)R(h) != R(gh)",
                                       {"g": _fmt(G, g), "h": _fmt(G, h)})
        detail += f"; R(g)R(h) = R(gh) for all {len(elements) ** 2} pairs"
    return CheckResult("injectivity", True, detail)


def _random_word(rng, letters, max_length):
    n = rng.randint(1, max_length)
    return [(rng.randrange(letters), rng.choice((1, -1))) for _ in range(n)]


def _eval_letters(W, gens, word):
    out = W.identity()
    inv = {}
    for i, e in word:
        if e > 0:
            out = W.mul(out, gens[i])
        else:
            if i not in inv:
                inv[i] = W.inv(gens[i])
            out = W.mul(out, inv[i])
    return out


def _format_letters(names, word):
    return " ".join(names[i] if e > 0 else f"{names[i]}^-1" for i, e in word)


def check_variety(w: EmbeddingWitness, rng, samples=DEFAULT_SAMPLES, max_length=DEFAULT_WORD_LENGTH) -> CheckResult:
    W = w.W
    gens = list(w.h_gens)
    for _ in range(samples):
        x = _random_word(rng, len(gens), max_length)
        y = _random_word(rng, len(gens), max_length)
        com = W.commutator(_eval_letters(W, gens, x), _eval_letters(W, gens, y))
        if not W.is_base(com):
            return CheckResult("variety", False, "commutator with a nontrivial active part",
                               {"x": _format_letters(w.h_names, x), "y": _format_letters(w.h_names, y),
                                "active_part": list(com.active)})
    return CheckResult("variety", True, f"{samples} random commutators of H-words are base elements")


def check_generator_count(w: EmbeddingWitness) -> CheckResult:
    claimed = 2 if w.theorem == "1" else 4
    n = len(w.h_gens)
    return CheckResult("generator_count", n == claimed, f"H has {n} generators (claimed {claimed})")


def check_exponent_sums(w: EmbeddingWitness, rng, words=DEFAULT_AUDIT_WORDS, max_length=DEFAULT_WORD_LENGTH,
                        box=None) -> CheckResult:
    """Words in the recovered elements whose exponent sum over some free
    generator is nonzero must evaluate to a nontrivial element."""
    W = w.W
    free = [r for r in w.recovery if r.role == "free"]
    if not free:
        return CheckResult("exponent_sum_audit", True, "no free abelian part: audit vacuous")
    others = [r for r in w.recovery if r.role != "free"]
    pool = free + others
    env = w.env()
    values = [evaluate(r.term, W, env) for r in pool]
    names = [r.label for r in pool]
    k = len(free)
    tested = 0
    while tested < words:
        word = _random_word(rng, len(pool), max_length)
        sigma = [sum(e for i, e in word if i == j) for j in range(k)]
        if not any(sigma):
            continue
        tested += 1
        x = _eval_letters(W, values, word)
        if W.is_identity(x, box):
            return CheckResult("exponent_sum_audit", False, "word with nonzero exponent sum is trivial",
                               {"word": _format_letters(names, word), "exponent_sums": sigma})
    return CheckResult("exponent_sum_audit", True,
                       f"{words} words with a nonzero free exponent sum are nontrivial on the window")


def check_exponent_bound(w: EmbeddingWitness, rng, samples=DEFAULT_SAMPLES, max_length=DEFAULT_WORD_LENGTH):
    W = w.W
    bound = w.info["exponent_bound"]
    gens = list(w.h_gens)
    for _ in range(samples):
        word = _random_word(rng, len(gens), max_length)
        x = _eval_letters(W, gens, word)
        n = W.element_order(x, bound + 1)
        if bound % n:
            return CheckResult("exponent_bound", False, f"element order {n} does not divide {bound}",
                               {"word": _format_letters(w.h_names, word), "order": n})
    return CheckResult("exponent_bound", True, f"{samples} sampled H-element orders divide {bound}")


# -- assembly -----------------------------------------------------------

def _mode(w: EmbeddingWitness):
    if w.W.active.is_finite:
        return {"kind": "exact"}
    return {"kind": "window", "box": [list(b) for b in w.W.box]}


def _statistics(w: EmbeddingWitness):
    W = w.W
    data = w.data
    dl = data.derived_length
    stats = {
        "wreath_product": W.description,
        "active_group": w.info.get("active_group"),
        "h_generators": list(w.h_names),
        "support_slots": w.info.get("slots"),
        "sequence": w.info.get("sequence"),
        "recovery_words": [{"label": r.label, "term": str(r.term)} for r in w.recovery],
        "generator_images": {n: str(t) for n, t in zip(data.group.names, w.generator_words)},
    }
    if W.active.is_finite:
        stats["domain_points"] = W.active.size
    else:
        stats["window_points"] = W.active.box_size(W.box)
    for key in ("s", "generator_orders", "exponent", "exponent_bound"):
        if key in w.info:
            stats[key] = w.info[key]
    stats["derived_length_G"] = dl
    stats["derived_length_H_bound"] = None if dl is None else dl + 1
    stats["abelianization"] = {
        "free_rank": len(data.free),
        "torsion_orders": [l for _, l in data.torsion],
    }
    return stats


def verify_witness(w: EmbeddingWitness, presentation=None, box=None, seed: int = 0,
                   samples: int = DEFAULT_SAMPLES, max_length: int = DEFAULT_WORD_LENGTH,
                   audit_words: int = DEFAULT_AUDIT_WORDS) -> EmbeddingCertificate:
    """Run checks (a)-(f) (plus the exponent bound on the exponent route)."""
    rng = random.Random(seed)
    images = recovered_generators(w)
    checks = [
        check_recovery_values(w, box),
        check_relators(w, images, presentation),
        check_injectivity(w, images),
        check_variety(w, rng, samples, max_length),
        check_generator_count(w),
        check_exponent_sums(w, random.Random(seed + 1), audit_words, max_length, box),
    ]
    if w.theorem == "cor6":
        checks.append(check_exponent_bound(w, random.Random(seed + 2), samples, max_length))
    mode = _mode(w)
    if box is not None and mode["kind"] == "window":
        mode["box"] = [list(b) for b in box]
    return EmbeddingCertificate(w.data.name, w.theorem, fingerprint(w.data), mode, checks, _statistics(w), seed)


def certify(theorem: str, data: GroupData, seed: int = 0, box=None, sequence=None, **kwargs) -> EmbeddingCertificate:
    """Build and verify; a construction failure becomes a failing certificate."""
    try:
        w = build_witness(theorem, data, sequence, box)
    except WreathEmbedError as exc:
        check = CheckResult("construction", False, f"{type(exc).__name__}: {exc}")
        stats = {"derived_length_G": data.derived_length}
        return EmbeddingCertificate(data.name, str(theorem), fingerprint(data), {"kind": "none"}, [check], stats, seed)
    return verify_witness(w, box=box, seed=seed, **kwargs)
