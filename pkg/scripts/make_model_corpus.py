"""Regenerate tests/data/model_corpus.json.

Each entry records a multilinear polynomial, a grading mode, a block shape,
and whether the generic-matrix model sends it to zero. Verdicts are computed
twice at generation time (rewriting backend and untruncated evaluation
kernel) and the script refuses to emit a corpus the two routes disagree on.
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gradedpi import Z2
from gradedpi.algebras import BlockShape, build_grassmann, build_matrix_over
from gradedpi.freealg import parse_poly
from gradedpi.model import ModelConfig, model_eval
from gradedpi.relfree import GradingMode
from gradedpi.spaces import identities_by_evaluation, membership

POLYS = [
    "[y1, y2]",
    "z1*z2 + z2*z1",
    "z1*z2 - z2*z1",
    "z1*z2",
    "[y1, z2]",
    "[[y1, y2], y3]",
    "z1*z2*z3 - z3*z2*z1",
    "[y1, y2]*z3",
    "z1*y2*z3 + z3*y2*z1",
    "z1*y2*z3",
    "[y1, y2]*[y3, y4]",
    "[y1, y2]*[z3, z4]",
    "z1*z2*y3*y4 + z2*z1*y3*y4",
]

MODES = ["natural", "infty", "kstar:1", "kstar:2"]
SHAPES = {"natural": [(1, 1), (2,)], "infty": [(1, 1)], "kstar:1": [(1, 1), (2,)], "kstar:2": [(1, 1)]}


def main():
    out = []
    for mode_token in MODES:
        mode = GradingMode.parse(mode_token)
        for sizes in SHAPES[mode_token]:
            for text in POLYS:
                f = parse_poly(text, Z2)
                n = f.max_degree()
                sig = tuple(f.universe[i] for i in sorted(f.universe))
                cfg = ModelConfig(BlockShape(sizes), Z2, mode)
                model_zero = model_eval(f, cfg).is_zero()

                entries = build_grassmann(mode.grassmann_spec(2 * n + 4))
                alg = build_matrix_over(entries, BlockShape(sizes))
                comp = identities_by_evaluation(alg, sig, method="limit")
                eval_zero = membership(f, comp)
                if model_zero != eval_zero:
                    raise SystemExit(
                        f"route disagreement: {mode_token} {sizes} {text}: "
                        f"model={model_zero} eval={eval_zero}"
                    )
                out.append(
                    {
                        "mode": mode_token,
                        "shape": list(sizes),
                        "poly": text,
                        "model_zero": model_zero,
                    }
                )
    path = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "model_corpus.json")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    zeros = sum(1 for e in out if e["model_zero"])
    print(f"wrote {len(out)} entries ({zeros} identities) to {path}")


if __name__ == "__main__":
    main()
