"""Exact symbolic toolkit for lambda-bracket algebra structures.

Subpackages by concern:

* ``poly``       exact rational polynomial ring with affine substitution
* ``conformal``  finite free algebras over C[d], brackets, axiom checkers
* ``extend``     two-part structures on R + Q, unified products, transport
* ``flag``       rank-one extension datums and their condition systems
* ``solver``     bounded-degree exact linear solving (derivations, centers)
* ``corpus``     named builtin objects and expectation scenarios
* ``cli``        the command line front end (entry point ``lambrack``)
"""

__version__ = "0.1.0"
