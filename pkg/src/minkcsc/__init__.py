"""Constant scalar curvature graphs in Minkowski space.

Submodules:
    minkowski     signature-(d,1) linear algebra
    slstructure   the real special lagrangian structure and frame machinery
    surfaces      spacelike graphs, jets, lifts, curtains
    solver        the sigma_2 Newton/continuation solver and stability operator
    equivariance  affine isometries, cocycles, the fuchsian foliation
    cli           command-line front end
"""

__version__ = "0.1.0"
