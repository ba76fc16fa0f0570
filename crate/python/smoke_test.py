#!/usr/bin/env python3
"""Smoke test for the pseudoturan extension module.

Build the module first:

    cargo build -p pseudoturan-python --release

then run this script: it copies the cdylib next to itself under the
importable name and exercises the main types and operations.
"""

import math
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

HERE = Path(__file__).resolve().parent
REPO = HERE.parent


def stage_module() -> None:
    candidates = [
        REPO / "target" / "release" / "libpseudoturan.so",
        REPO / "target" / "debug" / "libpseudoturan.so",
        REPO / "target" / "release" / "libpseudoturan.dylib",
        REPO / "target" / "debug" / "libpseudoturan.dylib",
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p pseudoturan-python --release")
    target = HERE / "pseudoturan.so"
    if not target.exists() or built.stat().st_mtime > target.stat().st_mtime:
        shutil.copy2(built, target)


stage_module()
sys.path.insert(0, str(HERE))

import pseudoturan as pt  # noqa: E402

checks = 0


def ok(cond: bool, what: str) -> None:
    global checks
    if not cond:
        sys.exit(f"FAIL: {what}")
    checks += 1
    print(f"ok: {what}")


# Pattern basics.
pet = pt.Graph.petersen()
ok(pet.n == 10 and pet.edge_count() == 15, "petersen shape")
ok(pet.regular_degree() == 3, "petersen is 3-regular")
ok(pt.is_triangle_free(pet), "petersen is triangle-free")

# Ordering parameters and the exponent bound.
ok(pt.d2(pet)["d"] == "3/2", "d2(petersen) = 3/2")
refined = pt.dhat2(pet)
ok(refined["d"] == "1" and refined["two_d"] == 2, "refined parameter = 1")
ok(pt.exp_upper(pet) == "2/3", "exponent upper bound 2/3")
ok(
    pt.eval_dhat2(pet, [0, 2, 5, 8, 1, 3, 4, 6, 7, 9], [1, 5], 2) == 2,
    "reference certificate evaluates to 2",
)

# Cubic Cayley construction: freeness and the eigenvalue bound.
g7 = pt.cubic_cayley(7)
ok(g7.n == 49 and g7.regular_degree() == 6, "cubic cayley shape at p=7")
ok(pt.is_triangle_free(g7) and pt.is_k23_free(g7), "cubic cayley freeness at p=7")
spec = pt.cubic_cayley_spectrum(7)
ok(spec["lambda1"] == 6.0, "top eigenvalue equals the degree")
ok(spec["lambda"] <= 2 * math.sqrt(7) + 1 + 1e-9, "second eigenvalue bound at p=7")
dense = pt.spectrum(g7)
ok(abs(dense["lambda"] - spec["lambda"]) < 1e-8, "character sums match dense numerics")

# Exponential-sum audit.
ok(pt.weil_audit(11) <= 2 * math.sqrt(11), "exponential-sum bound at p=11")

# Kopparty construction and its induced pattern copy.
k = pt.kopparty(2, 3)
ok(k.n == 512 and k.regular_degree() == 28, "kopparty(2,3) shape")
ok(pt.is_triangle_free(k), "kopparty(2,3) is triangle-free")
found = pt.contains_pattern(k, pet, induced=True)
ok(found is not None and len(set(found)) == 10, "induced petersen copy found")
for i, j in pet.edges():
    assert k.has_edge(found[i], found[j]), "copy preserves edges"

# Projective constructions.
ns = pt.nonsquare_subgraph(pt.ak_graph(2, 5))
ok(pt.is_triangle_free(ns), "nonsquare subgraph of AK(2,5) is triangle-free")
ev = pt.even_t_construction(4, 5)
ok(pt.clique_number(ev, 4) <= 3, "even-t construction at q=5 has no 4-clique")

# Distance graph.
d = pt.distance_graph(5)
ok(d.n == 25 and d.regular_degree() == 4, "distance graph shape at q=5")
ok(pt.is_k23_free(d), "distance graph is K_{2,3}-free at q=5")

# Jumbledness and the mixing inequality.
cert = pt.jumbled_cert(g7)
ok(Fraction(cert["density"]) == Fraction(6, 49), "certificate density 6/49")
disc = pt.sample_discrepancy(g7, 6 / 49, 2000, 1)
ok(disc <= cert["alpha"] + 1e-6, "sampled discrepancy below lambda")

# Embedding pipeline on a random host.
host = pt.Graph.random_gnp(1500, 0.5, 42)
out = pt.embed_petersen(host, 0.5)
ok("map" in out, "pipeline embeds the pattern in G(1500, 1/2)")
m = out["map"]
for i, j in pet.edges():
    assert host.has_edge(m[i], m[j]), "embedding preserves edges"
ok(len(set(m)) == 10, "embedding is injective")

# Persistence round trip.
with tempfile.TemporaryDirectory() as tmp:
    path = str(Path(tmp) / "g7.el")
    g7.write(path)
    back = pt.Graph.read(path)
    ok(back.edges() == g7.edges(), "edge-list round trip")

pre = pt.check_embedding_preconditions(10**9, 1e-2, 1e-4 * 1e9 / 300)
ok(pre["alpha_ok"] and pre["density_ok"], "density preconditions at the reference point")

print(f"\nsmoke test passed ({checks} checks, version {pt.__version__})")
