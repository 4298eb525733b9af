"""hochform: exact symbolic verification of the comparison calculus between
polydifferential-operator cochains of a polynomial algebra and its
polyvector fields.

Subpackages by layer:

- exactlin:   sparse rational linear algebra (rank / kernel / homology / solve)
- polyalg:    polynomials, derivations, polyvector fields, wedge, odd bracket
- hochschild: polydifferential cochains, coboundary, cup, braces, antisymmetrizer
- cooperadic: signed word calculus (shuffles, Lyndon normal forms, cobrackets,
              bar and bialgebra structure)
- formality:  the bridge coalgebra, its codifferential, obstruction systems,
              free bracket/product envelope, comparison maps
- suites/cli: verification suites and command line driver
"""

__version__ = "0.1.0"
