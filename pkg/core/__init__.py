"""
debranges-lab core package.

Numerical modules: Hardy-space substrate, outer factorization, contraction
toolkit, de Branges-Rovnyak models, rank-one dilations and the C1-C4 checks.
"""
