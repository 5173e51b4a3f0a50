"""Verification suites as lists of independent, individually seeded tasks.

A task is a module-level function plus keyword arguments, so it can cross a
process boundary.  Its RNG is derived from the run seed and the task key
alone; serial and parallel runs therefore agree check for check.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .exact import random_scalar
from .report import Check
from .shuffle import DEFAULT_BOUND, DEFAULT_RESAMPLE_BUDGET, DEFAULT_TRIALS, Generator
from .signature import AlgebraSignature, sample_generic_point

SUITES = ("identities", "wheel", "membership", "commutativity", "fusion", "example211",
          "classical", "series")

STRUCTURE_CASES = ((2, 1, 1), (2, 1, 2), (3, 1, 1), (2, 0, 2), (3, 0, 1), (1, 0, 3))
COMMUTATIVITY_SIGNATURES = ((1, 0), (2, 0), (3, 0), (2, 1))
FUSION_SIGNATURES = ((2, 1), (2, 0), (3, 0))
FUSION_EXTRA_SIGNATURES = ((3, 1), (3, 2), (4, 0))


@dataclass
class RunConfig:
    seed: int = 0
    trials: int = DEFAULT_TRIALS
    bound: int = DEFAULT_BOUND
    budget: int = DEFAULT_RESAMPLE_BUDGET
    jobs: int = 1
    # size flags; None selects the documented default set
    m: Optional[int] = None
    n: Optional[int] = None
    max_mn: int = 3
    max_c: int = 3
    max_N: int = 2
    max_r: int = 3
    variant: str = "erratum"
    extended: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def signature_filter(self, cases):
        if self.m is None:
            return list(cases)
        return [c for c in cases if c[0] == self.m and (self.n is None or c[1] == self.n)]


@dataclass(frozen=True)
class Task:
    key: str
    fn: Callable
    kwargs: dict = field(default_factory=dict)


def task_rng(seed: int, key: str) -> random.Random:
    return random.Random(f"{seed}:{key}")


def run_task(task: Task, cfg: RunConfig) -> list[Check]:
    return task.fn(task_rng(cfg.seed, task.key), cfg, **task.kwargs)


def _run_packed(args):
    return run_task(*args)


def run_tasks(tasks: list[Task], cfg: RunConfig) -> list[Check]:
    """Checks of all tasks, merged in task order whatever the schedule."""
    if cfg.jobs <= 1 or len(tasks) <= 1:
        results = [run_task(t, cfg) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_packed, [(t, cfg) for t in tasks], chunksize=1))
    return [c for batch in results for c in batch]


def _q(rng: random.Random, bound: int) -> Fraction:
    while True:
        q = random_scalar(rng, bound)
        if abs(q) != 1:
            return q


# ----------------------------------------------------------------------------
# identities


def _t_ic_identities(rng, cfg):
    from .special import check_Ic_identities

    return check_Ic_identities(_q(rng, cfg.bound), rng, cfg.max_mn, cfg.max_c, cfg.trials, cfg.bound)


def _t_icq(rng, cfg):
    from .special import check_Icq

    q = _q(rng, cfg.bound)
    return [check_Icq(q, rng, N, c, sign, cfg.trials, cfg.bound, cfg.budget)
            for N in range(1, cfg.max_mn + 1) for c in range(-cfg.max_c, cfg.max_c + 1) for sign in (1, -1)]


def _t_iwheel(rng, cfg):
    from .special import check_Iwheel

    q = _q(rng, cfg.bound)
    return [check_Iwheel(q, rng, N, c, cfg.trials, cfg.bound, cfg.budget)
            for N in range(2, max(3, cfg.max_mn) + 1) for c in range(-cfg.max_c, cfg.max_c + 1)]


def _t_asymptotics(rng, cfg):
    from .special import check_asymptotics, check_nonzero_thresholds

    q = _q(rng, cfg.bound)
    top = min(2, cfg.max_mn)
    out = []
    for M in range(top + 1):
        for N in range(top + 1):
            for k in range(M + 1):
                for l in range(N + 1):
                    for c in range(-cfg.max_c, cfg.max_c + 1):
                        out.append(check_asymptotics(q, rng, M, N, k, l, c, cfg.trials, cfg.bound, cfg.budget))
    for N in range(1, top + 1):
        for k in range(N + 1):
            for l in range(N + 1):
                for c in range(1, cfg.max_c + 1):
                    out.append(check_nonzero_thresholds(q, rng, N, k, l, c, cfg.trials, cfg.bound, cfg.budget))
    return out


def _t_appendix(rng, cfg):
    from .special import check_appendix_identity

    q = _q(rng, cfg.bound)
    return [check_appendix_identity(q, rng, N, cfg.trials, cfg.bound, cfg.budget)
            for N in range(1, cfg.max_mn + 1)]


def identities_tasks(cfg: RunConfig) -> list[Task]:
    return [Task("identities:Ic", _t_ic_identities), Task("identities:Icq", _t_icq),
            Task("identities:Iwheel", _t_iwheel), Task("identities:asymptotics", _t_asymptotics),
            Task("identities:appendix", _t_appendix)]


# ----------------------------------------------------------------------------
# generators: structure, membership, classical, series


def _structure_cases(cfg):
    if cfg.m is None:
        return list(STRUCTURE_CASES)
    n = cfg.n or 0
    return [(cfg.m, n, N) for N in range(1, cfg.max_N + 1)]


def _t_structure(rng, cfg, m, n, N, r, star):
    from .bethe import G, Gstar, check_structure

    sig = AlgebraSignature(m, n)
    p = sample_generic_point(sig, rng, cfg.bound)
    e = Gstar(sig, r, N) if star else G(sig, r, N)
    return check_structure(e, p, rng, cfg.trials, cfg.bound, cfg.budget)


def wheel_tasks(cfg: RunConfig) -> list[Task]:
    out = []
    for m, n, N in _structure_cases(cfg):
        for star in ((False, True) if n else (False,)):
            for r in range(m + 4):
                out.append(Task(f"wheel:{m},{n},{N},{r},{int(star)}", _t_structure,
                                dict(m=m, n=n, N=N, r=r, star=star)))
    return out


def _t_membership(rng, cfg, m, n, N, r, star):
    from .bethe import G, Gstar, element_label
    from .membership import membership_check

    sig = AlgebraSignature(m, n)
    p = sample_generic_point(sig, rng, cfg.bound)
    e = Gstar(sig, r, N) if star else G(sig, r, N)
    v = membership_check(e, p, rng, trials=3, bound=cfg.bound, budget=cfg.budget,
                         name=f"membership[{element_label(e)}@{sig.label}]")
    v.check.params["element"] = element_label(e)
    v.check.params["scaling_vectors"] = (N + 1) ** sig.K
    return [v.check]


def _t_nonsquare(rng, cfg):
    from .membership import nonsquare_degree_probe

    sig = AlgebraSignature(2, 1)
    p = sample_generic_point(sig, rng, cfg.bound)
    e = Generator(sig, 1, 0) * Generator(sig, 2, 1)
    chk = nonsquare_degree_probe(e, p, rng).check
    # off the equal-degree part the limit condition is expected to fail
    out = Check("membership-control[unequal degrees]", "bethe-membership-ratio-of-limits",
                dict(chk.params), chk.trials)
    if chk.passed:
        out.fail(reason="an unequal-degree element passed the membership test")
    else:
        out.params["rejected_at"] = chk.witness
    return [out]


def membership_tasks(cfg: RunConfig) -> list[Task]:
    out = []
    for m, n, N in _structure_cases(cfg):
        for star in ((False, True) if n else (False,)):
            for r in range(m + 4):
                out.append(Task(f"membership:{m},{n},{N},{r},{int(star)}", _t_membership,
                                dict(m=m, n=n, N=N, r=r, star=star)))
    out.append(Task("membership:control", _t_nonsquare))
    return out


def _t_classical(rng, cfg):
    from .bethe import check_eps_family, check_top_generator, check_vanishing_beyond

    out = []
    one = AlgebraSignature(1, 0)
    for N in range(1, 4):
        out.append(check_eps_family(sample_generic_point(one, rng, cfg.bound), N, rng,
                                    cfg.trials, cfg.bound, cfg.budget))
    for m, N in ((2, 1), (2, 2), (3, 1)):
        sig = AlgebraSignature(m, 0)
        p = sample_generic_point(sig, rng, cfg.bound)
        out.append(check_top_generator(sig, p, N, rng, cfg.trials, cfg.bound, cfg.budget))
        for r in range(m + 1, m + 4):
            out.append(check_vanishing_beyond(sig, p, N, r, rng, cfg.trials, cfg.bound, cfg.budget))
    return out


def classical_tasks(cfg: RunConfig) -> list[Task]:
    return [Task("classical", _t_classical)]


def _t_series(rng, cfg, m, n, N):
    from .bethe import check_series_truncation

    sig = AlgebraSignature(m, n)
    p = sample_generic_point(sig, rng, cfg.bound)
    return [check_series_truncation(sig, p, N, rng, star, 4, 3, cfg.bound, cfg.budget)
            for star in ((False, True) if n else (False,))]


def series_tasks(cfg: RunConfig) -> list[Task]:
    return [Task(f"series:{m},{n},{N}", _t_series, dict(m=m, n=n, N=N)) for m, n, N in _structure_cases(cfg)]


# ----------------------------------------------------------------------------
# commutativity
#
# Cost model: one commutator evaluation sums prod_i C(N+N', N) splittings per
# product, each evaluating both factors at degree N and N'.


def _t_commutator(rng, cfg, m, n, left, right):
    from .bethe import G, Gstar, check_commutator

    sig = AlgebraSignature(m, n)
    p = sample_generic_point(sig, rng, cfg.bound)
    make = lambda spec: (Gstar if spec[0] else G)(sig, spec[1], spec[2])
    return [check_commutator(make(left), make(right), p, rng, cfg.trials, cfg.bound, cfg.budget)]


def _t_control(rng, cfg, m, n):
    from .bethe import check_commutator

    sig = AlgebraSignature(m, n)
    p = sample_generic_point(sig, rng, cfg.bound)
    return [check_commutator(Generator(sig, 1, 0), Generator(sig, 2, 0), p, rng, cfg.trials, cfg.bound,
                             cfg.budget, expect_commute=False,
                             name=f"commutator-control[x_1^0,x_2^0@{sig.label}]")]


def commutativity_tasks(cfg: RunConfig) -> list[Task]:
    out = []
    for m, n in cfg.signature_filter(COMMUTATIVITY_SIGNATURES):
        gens = [(False, r, N) for N in range(1, cfg.max_N + 1) for r in range(cfg.max_r + 1)]
        stars = [(True, r, N) for N in range(1, cfg.max_N + 1) for r in range(cfg.max_r + 1)] if n else []
        pairs = [(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]]
        pairs += [(a, b) for a in gens for b in stars]
        for a, b in pairs:
            key = f"commutativity:{m},{n}:{a}:{b}"
            out.append(Task(key, _t_commutator, dict(m=m, n=n, left=a, right=b)))
        if m + n >= 2:
            out.append(Task(f"commutativity:{m},{n}:control", _t_control, dict(m=m, n=n)))
    if not any(t.key.endswith(":control") for t in out):
        out.append(Task("commutativity:2,0:control", _t_control, dict(m=2, n=0)))
    return out


# ----------------------------------------------------------------------------
# fusion


def _fusion_pairs(sig):
    """Degree-1 factors with nonzero images (an increasing product of generators specializes to 0)."""
    from .bethe import G

    rev = Generator(sig, sig.K, 0)
    for i in range(sig.K - 1, 0, -1):
        rev = rev * Generator(sig, i, 0)
    return [("G0*G1", G(sig, 0, 1), G(sig, 1, 1)), ("G1*rev", G(sig, 1, 1), rev)]


def _t_fusion_hom(rng, cfg, m, n, variant, role):
    from .fusion import homomorphism_check, sample_stage

    sig = AlgebraSignature(m, n)
    stage = sample_stage(sig, rng, cfg.bound, variant)
    out = []
    for label, F, H in _fusion_pairs(sig):
        chk = homomorphism_check(stage, F, H, rng, cfg.trials, cfg.bound, cfg.budget,
                                 name=f"fusion-homomorphism[{sig.label},{label},{variant}]")
        chk.role = role
        out.append(chk)
    return out


def _t_fusion_images(rng, cfg, m, n, variant):
    from .bethe import G
    from .fusion import check_image_validity, sample_stage

    sig = AlgebraSignature(m, n)
    stage = sample_stage(sig, rng, cfg.bound, variant)
    out = []
    for N in (1, 2):
        out += check_image_validity(stage, G(sig, 1, N), rng, trials=2, bound=cfg.bound, budget=cfg.budget,
                                    name=f"fusion-image[G(r=1,N={N})]")
    return out


def _t_fusion_series(rng, cfg, m, n, printed):
    from .fusion import surjectivity_probes

    sig = AlgebraSignature(m, n)
    out = surjectivity_probes(sig, rng, max_N=min(cfg.max_N, 2), variant=cfg.variant if cfg.variant != "printed"
                              else "erratum", printed_form=printed, bound=cfg.bound, budget=cfg.budget)
    if printed:
        for c in out:
            c.role = "probe"
            c.name = c.name + ":printed-form"
    return out


def _t_fusion_lemma(rng, cfg, m, n, variant, role):
    from .fusion import check_lemma_consistency, sample_stage

    sig = AlgebraSignature(m, n)
    stage = sample_stage(sig, rng, cfg.bound, variant)
    out = []
    for N in (1, 2):
        for L in range(N + 1):
            chk = check_lemma_consistency(stage, N, L, rng, bound=cfg.bound, budget=cfg.budget)
            chk.role = role
            chk.name += f":{variant}"
            out.append(chk)
    return out


def _t_fusion_iterate(rng, cfg, m, n):
    from .fusion import check_iterate

    return [check_iterate(AlgebraSignature(m, n), rng, trials=2, bound=cfg.bound,
                          budget=cfg.budget, variant=cfg.variant)]


def fusion_tasks(cfg: RunConfig) -> list[Task]:
    """Verdicts use cfg.variant; the remaining variants run as discrepancy probes."""
    sigs = list(FUSION_SIGNATURES) + (list(FUSION_EXTRA_SIGNATURES) if cfg.extended else [])
    sigs = cfg.signature_filter(sigs) or cfg.signature_filter(FUSION_EXTRA_SIGNATURES)
    probes = [v for v in ("printed", "erratum") if v != cfg.variant]
    out = []
    for m, n in sigs:
        out.append(Task(f"fusion:{m},{n}:hom:{cfg.variant}", _t_fusion_hom,
                        dict(m=m, n=n, variant=cfg.variant, role="verdict")))
        for v in probes:
            out.append(Task(f"fusion:{m},{n}:hom:{v}", _t_fusion_hom, dict(m=m, n=n, variant=v, role="probe")))
        out.append(Task(f"fusion:{m},{n}:images", _t_fusion_images, dict(m=m, n=n, variant=cfg.variant)))
        out.append(Task(f"fusion:{m},{n}:series", _t_fusion_series, dict(m=m, n=n, printed=False)))
        if n == 0:
            out.append(Task(f"fusion:{m},{n}:series-printed", _t_fusion_series, dict(m=m, n=n, printed=True)))
        if n >= 1:
            out.append(Task(f"fusion:{m},{n}:lemma:{cfg.variant}", _t_fusion_lemma,
                            dict(m=m, n=n, variant=cfg.variant, role="verdict")))
            for v in probes:
                out.append(Task(f"fusion:{m},{n}:lemma:{v}", _t_fusion_lemma,
                                dict(m=m, n=n, variant=v, role="probe")))
        out.append(Task(f"fusion:{m},{n}:iterate", _t_fusion_iterate, dict(m=m, n=n)))
    return out


# ----------------------------------------------------------------------------
# worked example


def _t_example(rng, cfg):
    from .membership import check_tiny_solver
    from .symbolic import reproduce_worked_example

    return reproduce_worked_example() + check_tiny_solver()


def example_tasks(cfg: RunConfig) -> list[Task]:
    return [Task("example211", _t_example)]


BUILDERS = {
    "identities": identities_tasks,
    "wheel": wheel_tasks,
    "membership": membership_tasks,
    "commutativity": commutativity_tasks,
    "fusion": fusion_tasks,
    "example211": example_tasks,
    "classical": classical_tasks,
    "series": series_tasks,
}


def build_tasks(suite: str, cfg: RunConfig) -> list[Task]:
    if suite == "all":
        return [t for name in SUITES for t in BUILDERS[name](cfg)]
    if suite not in BUILDERS:
        raise ValueError(f"unknown suite {suite!r}")
    return BUILDERS[suite](cfg)


def run_suite(suite: str, cfg: Optional[RunConfig] = None) -> list[Check]:
    cfg = cfg or RunConfig()
    return run_tasks(build_tasks(suite, cfg), cfg)
