"""Wall-clock comparison of the two samplers on power-law inputs."""

import argparse
import time

from chunglu.distributions import expand_to_weights, power_law_distribution
from chunglu.generator import generate_bernoulli, generate_edge_skipping


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--beta", type=float, default=2.0)
    parser.add_argument("--m", type=int, default=40)
    parser.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    parser.add_argument("--bernoulli-max", type=int, default=10_000, help="skip the quadratic sampler above this N")
    args = parser.parse_args()

    print("N,nodes,edges,skip_s,bernoulli_s")
    for n in args.sizes:
        w = expand_to_weights(power_law_distribution(n, args.beta, args.m))
        t0 = time.perf_counter()
        g = generate_edge_skipping(w, 0)
        t_skip = time.perf_counter() - t0
        t_bern = ""
        if n <= args.bernoulli_max:
            t0 = time.perf_counter()
            generate_bernoulli(w, 0)
            t_bern = f"{time.perf_counter() - t0:.3f}"
        print(f"{n},{len(w)},{g.edge_count},{t_skip:.3f},{t_bern}")


if __name__ == "__main__":
    main()
