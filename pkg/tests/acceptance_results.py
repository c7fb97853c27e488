"""Shared record of acceptance outcomes, printed by conftest at the end of a run."""

TITLES = {
    1: "dim-2 classification at p = 5 and p = 7",
    2: "crossed-product oracle equivalence",
    3: "reconstruction round-trip",
    4: "cohomology two-path agreement",
    5: "GH^2(k, k) over F_5 has 9 classes",
    6: "Galois group vs V-fixing automorphisms",
    7: "abelian-kernel linear algebra",
    8: "property suites",
}

RESULTS: dict[int, tuple[bool, str]] = {}
