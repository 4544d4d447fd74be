"""Walk through the Verma graph: covariance, its nested constraint and
the restricted separation behind it."""

from nestdet import catalog
from nestdet.constraints import det, expand_nested, f_ij, parental_matrix
from nestdet.symbolic import restricted_covariance
from nestdet.treks import min_restricted_cut
from nestdet.verify import vanishes_symbolically

g = catalog.graph("verma")
print("graph:", g)

F = parental_matrix(g, "4", ["1"])
print("parental matrix rows", F.rows, "cols", F.cols)
for row in F.as_strings():
    print("   ", row)
f = f_ij(g, "4", "1")
print("f_41 =", f)
print("vanishes:", vanishes_symbolically(g, f).status)

nested = det([[("12", "12"), ("12", "34")], [("13", "12"), ("13", "34")]])
print("|[[S12,12 S12,34],[S13,12 S13,34]]| =", expand_nested(nested))

cert = min_restricted_cut(g, "24", "23", "24", "234")
print("restricted cut for A=24, B=23, P=24, Q=234:", cert.SL, cert.SR, "size", cert.size)
block = restricted_covariance(g, "24", "234").sub("24", "23")
for row in block.as_strings():
    print("   ", row)
