"""Writes every semilattice (commutative idempotent semigroup) on {0..n-1}, n <= 3."""
import itertools
import pathlib
import sys

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "tables/semilattices_le3")
out.mkdir(parents=True, exist_ok=True)
for n in range(1, 4):
    k = 0
    for cells in itertools.product(range(n), repeat=n * n):
        t = [cells[i * n:(i + 1) * n] for i in range(n)]
        if any(t[x][x] != x for x in range(n)):
            continue
        if any(t[x][y] != t[y][x] for x in range(n) for y in range(n)):
            continue
        if any(t[t[x][y]][z] != t[x][t[y][z]] for x in range(n) for y in range(n) for z in range(n)):
            continue
        name = f"sl{n}_{k}"
        rows = "\n".join(" ".join(map(str, r)) for r in t)
        (out / f"{name}.tbl").write_text(f"algebra {name}\nsize {n}\nop mul 2\n{rows}\n")
        k += 1
