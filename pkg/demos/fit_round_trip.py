"""Sample an exact covariance from the Verma model, test membership and
recover the parameters; then perturb one entry."""

from fractions import Fraction

from nestdet import catalog
from nestdet.verify import SampleSpec, fit_parameters, membership_check, sample_covariance

g = catalog.graph("verma")
smp = sample_covariance(SampleSpec(seed=3), g)
print("Lambda:", smp.draw.Lambda)
print("Omega: ", smp.draw.Omega)
print("member:", membership_check(g, smp.sigma))

wit = fit_parameters(g, smp.sigma)
print("refit reproduces sigma:", wit.reproduces)
print("same Lambda:", wit.Lambda == smp.draw.Lambda, "same Omega:", wit.Omega == smp.draw.Omega)

bad = [list(r) for r in smp.sigma]
bad[0][3] += Fraction(1, 7)
bad[3][0] = bad[0][3]
print("after nudging sigma_14 by 1/7, member:", membership_check(g, bad))
