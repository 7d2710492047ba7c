from fsde.estimation.variances import rho, asym_variances
from fsde.estimation.estimators import vnt, phi, phi_inverse, estimate_h1, estimate_h2, estimate_c2
