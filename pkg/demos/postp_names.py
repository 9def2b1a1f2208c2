"""Stable names for grounder auxiliary atoms.

Grounds the same named choice rule with two different auxiliary-id seeds,
shows that the raw programs disagree, and that postprocessing maps both to
the same indexed names.
"""

from aspguide.postp import augment, mock_ground, postprocess_detailed
from aspguide.textio import parse_program, render_program

SOURCE = "p(1).\np(2).\np(3).\n1 {a(1), a(2), a(3)} 2.\n"


def main():
    program = parse_program(SOURCE)
    named = augment(program, {3: "r1"})
    print("augmented program:")
    print(render_program(named))
    for seed in (1, 2):
        ground = mock_ground(named, aux_seed=seed)
        res = postprocess_detailed(ground)
        print(f"-- aux seed {seed}: raw ground program")
        print(render_program(ground))
        print(f"-- aux seed {seed}: bindings")
        for aux, name in res.association.mapping().items():
            print(f"   {aux} -> {name}")
        print(f"-- aux seed {seed}: after postprocessing")
        print(render_program(res.program))


if __name__ == "__main__":
    main()
