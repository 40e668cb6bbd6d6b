"""Watch the radial dynamics on the two-site-per-axis cube (M = 2).

With background 2d + (d - 1), the state only depends on how many
coordinates equal 2, so the whole cube collapses to a line 0..d. The run
starts with an all-fire block whose edge a_t shrinks on a predictable
schedule, then a returning wave ripples back out. Print both against
their closed forms.
"""

import sys

from sandcube.radial import (
    block_edge,
    block_threshold,
    closed_form_check,
    m1_critical_check,
    radial_run,
)


def main():
    d = int(sys.argv[1]) if len(sys.argv) > 1 else 10

    traj = radial_run(d)
    print(f"d={d}, background {2*d + d - 1}: stabilized after {len(traj)-1} steps")
    print(f"block threshold t_d = {block_threshold(d)}")
    print()
    print(" t  a_t  odometer (x = number of coordinates equal to 2)")
    for t in range(1, len(traj)):
        a = block_edge(d, t)
        marker = "" if a < 0 else f"  edge at x={a}"
        print(f"{t:3d} {a:4d}  {traj[t].tolist()}{marker}")

    print()
    rep = closed_form_check(d)
    print(rep.line())

    # the one-site cube one dimension up shows the critical background:
    # a single extra chip pushes it over, two parallel steps, done
    sig = m1_critical_check(d + 1)
    print(f"M=1 critical signature in d={d+1}: fires {sig} across the step pair")


if __name__ == "__main__":
    main()
