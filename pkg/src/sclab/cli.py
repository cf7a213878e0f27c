"""Command-line entry point: ``sclab sample|betti|garland|expect|classify|experiment``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import harness, theory
from .complex import SimplicialComplex
from .homology import betti
from .sampler import ProbabilitySchedule, SampleSpec, sample
from .spectral import garland_certificate

EXIT_INVARIANT = 3


def _floats(text: str) -> list[float]:
    return [math.inf if t.strip() in ("inf", "Infinity") else float(t) for t in text.split(",") if t.strip()]


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text() if path != "-" else sys.stdin.read())
    except OSError as exc:
        raise SystemExit(f"cannot read {path}: {exc}")


def _emit(text: str, out: str | None):
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise SystemExit(f"cannot write {out}: {exc}")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_sample(a) -> int:
    if a.config:
        spec = SampleSpec.from_dict(_read_json(a.config))
        if a.seed is not None:
            spec = SampleSpec(spec.n, spec.schedule, a.seed)
    else:
        if a.n is None or (a.probs is None) == (a.alpha is None):
            raise SystemExit("sample needs --config, or --n with exactly one of --probs/--alpha")
        sched = (ProbabilitySchedule.explicit(_floats(a.probs)) if a.probs
                 else ProbabilitySchedule.power_law(_floats(a.alpha)))
        spec = SampleSpec(a.n, sched, a.seed or 0)
    X = sample(spec)
    _emit(X.to_json(spec.to_dict()) + "\n", a.out)
    return 0


def cmd_betti(a) -> int:
    X = SimplicialComplex.from_json(Path(a.complex).read_text() if a.complex != "-" else sys.stdin.read())
    rep = betti(X, method=a.method, prime=a.prime)
    d = rep.to_dict()
    if rep.prime is not None:
        d["prime"] = rep.prime
    _emit(_dump(d), a.out)
    return 0


def cmd_garland(a) -> int:
    X = SimplicialComplex.from_json(Path(a.complex).read_text() if a.complex != "-" else sys.stdin.read())
    _emit(_dump(garland_certificate(X, a.k).to_dict()), a.out)
    return 0


def cmd_expect(a) -> int:
    probs = _floats(a.probs)
    k, n = a.k, a.n
    out = {"n": n, "k": k, "probs": probs}
    eta, gamma = theory.eta_gamma(k, probs)
    out["eta"], out["gamma"] = eta, gamma
    out["f"] = [theory.expected_face_count(n, d, probs) for d in range(len(probs) + 1)]
    if n > k:
        out["N"] = theory.expected_free_faces(n, k, probs)
    if n > k + 1:
        out["M"] = theory.expected_boundaries(n, k, probs)
    if k >= 2:
        lp = theory.link_params(k, probs)
        out["p_bar"], out["p_prime"] = lp.p_bar, lp.p_prime
    _emit(_dump(out), a.out)
    return 0


def cmd_classify(a) -> int:
    alpha = _floats(a.alpha)
    rows = [theory.classify_regime(theory.RegimeInput(k, tuple(alpha), a.pk_is_one)).to_dict()
            for k in range(a.k_min, a.k_max + 1)]
    if a.format == "json":
        _emit(_dump(rows), a.out)
        return 0
    cols = ("k", "label", "vanishing_sum", "link_sum", "boundary_sum")
    cells = [[str(r[c]) if not isinstance(r[c], float) else f"{r[c]:.6g}" for c in cols] for r in rows]
    width = [max(len(c), *(len(x[i]) for x in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, width))]
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, width)) for row in cells]
    _emit("\n".join(lines) + "\n", a.out)
    return 0


def cmd_experiment(a) -> int:
    if (a.preset is None) == (a.config is None):
        raise SystemExit("experiment needs exactly one of --preset/--config")
    try:
        cfg = harness.preset(a.preset) if a.preset else harness.ExperimentConfig.from_dict(_read_json(a.config))
    except KeyError as exc:
        raise SystemExit(str(exc.args[0]))
    changes = {}
    if a.seed is not None:
        changes["master_seed"] = a.seed
    if a.trials is not None:
        changes["trials"] = a.trials
    if a.n:
        changes["n"] = tuple(int(x) for x in a.n.split(","))
    if changes:
        cfg = cfg.replace(**changes)
    out = a.out or cfg.output
    result = harness.run(cfg, workers=a.workers, out=out)
    if not out:
        sys.stdout.write(result.csv())
    else:
        sys.stderr.write(f"wrote {out}/records.csv and {out}/summary.json\n")
    if result.violations:
        sys.stderr.write(f"hard invariant violated: certified but nonzero Betti number at {result.violations}\n")
        return EXIT_INVARIANT
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sclab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample a complex and print its JSON")
    s.add_argument("--config", help="SampleSpec JSON file")
    s.add_argument("--n", type=int)
    s.add_argument("--probs", help="comma-separated p_1,p_2,...")
    s.add_argument("--alpha", help="comma-separated exponents, p_i = n^-alpha_i")
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("betti", help="Betti numbers of a complex JSON file")
    s.add_argument("complex", help="complex JSON path or - for stdin")
    s.add_argument("--method", choices=("exact", "modp"), default="exact")
    s.add_argument("--prime", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_betti)

    s = sub.add_parser("garland", help="spectral vanishing certificate")
    s.add_argument("complex")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_garland)

    s = sub.add_parser("expect", help="closed-form expectations")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--probs", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_expect)

    s = sub.add_parser("classify", help="regime verdicts for an exponent vector")
    s.add_argument("--alpha", required=True)
    s.add_argument("--k-min", type=int, default=1)
    s.add_argument("--k-max", type=int, default=None)
    s.add_argument("--pk-is-one", action="store_true")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--out")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    s.add_argument("--preset")
    s.add_argument("--config")
    s.add_argument("--seed", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--n", help="comma-separated vertex counts overriding the config")
    s.add_argument("--workers", type=int, help=f"defaults to ${harness.WORKERS_ENV} or 1")
    s.add_argument("--out", help="output directory")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    if a.command == "classify" and a.k_max is None:
        a.k_max = max(a.k_min, len(_floats(a.alpha)))
    try:
        return a.func(a)
    except (ValueError, harness.ExperimentError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
