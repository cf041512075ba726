"""Find the fastest descent path on a discretised brachistochrone board.

Every candidate curve starts at (0, 2), ends at (pi, 0), and is pinned to
one grid ordinate per interior column.  Descent time comes from the
quadrature of sqrt((1 + y'^2) / (2 g y)).
"""

from gridgrover import (
    BrachistochroneCost,
    CostTable,
    SolutionSetQuery,
    build_brachistochrone_grid,
    cross_path_rate,
    cycloid_descent_time,
    derive_local_marked_sets,
    interpolate,
    straight_line_descent_time,
)

k, n = 3, 8
grid = build_brachistochrone_grid(k, n)
cost = BrachistochroneCost(grid)

print(f"{k} interior columns, {n} ordinates each, {n**k} candidate paths")
table = CostTable.build(grid.sizes, cost)
path, best = table.minimum()

line = straight_line_descent_time()
floor = cycloid_descent_time()
print(f"straight line: {line:.6f}")
print(f"best grid path {path}: {best:.6f}")
print(f"true cycloid:  {floor:.6f}  (unreachable floor)")

xs, ys = grid.node_points(path)
print("winning ordinates:", [round(float(y), 3) for y in ys[1:-1]])
curve = interpolate(grid, path)
print("interpolated midpoint height:", round(float(curve(1.5708)), 4))

# which ordinates per column appear in any path cheaper than the line?
query = SolutionSetQuery(0.0, line, grid, cost)
sets = derive_local_marked_sets(query)
for i, ms in enumerate(sets):
    print(f"column {i}: {len(ms.marked)}/{n} ordinates occur in sub-line paths")
rate = cross_path_rate(query)
print(f"product-set members that are not actual solutions: {rate:.3f}")
