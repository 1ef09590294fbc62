#!/usr/bin/env python3
"""Tabulate the cube-triangulation certificates for small dimensions and
resolutions: simplex counts, exact diameters, vertex-star maxima vs the
2^n n! bound, and the facet-matching check."""

import math

from vkit.fk import FKTriangulation, facet_counts, is_boundary_face, star_bound


def main() -> None:
    print(f"{'n':>2} {'p':>2} {'simplices':>10} {'diameter':>10} "
          f"{'max star':>8} {'bound':>6} {'facets ok':>9}")
    for n in (1, 2, 3):
        for p in (1, 2, 3):
            tri = FKTriangulation(n, p)
            worst_star = max(tri.vertex_star_size(v) for v in tri.vertices())
            facets_ok = all(
                count == (1 if is_boundary_face(tri, face) else 2)
                for face, count in facet_counts(tri).items())
            print(f"{n:>2} {p:>2} {tri.simplex_count:>10} "
                  f"{math.sqrt(n) / p:>10.6f} {worst_star:>8} "
                  f"{star_bound(n):>6} {str(facets_ok):>9}")


if __name__ == "__main__":
    main()
