"""Multi-version codes for consistent distributed storage.

A server that has received some subset of totally ordered message versions
encodes what it holds; any quorum of c servers must be able to rebuild the
latest version they all share, or something newer.  This package provides:

- ``gf256``      exact GF(2^8) arithmetic and evaluation-style erasure coding
- ``allocation`` storage-allocation tables (coded construction, replication,
                 per-version MDS) and their cost formulas
- ``codec``      an executable causal codec over an allocation table
- ``verifier``   exhaustive correctness certification of tables and codecs
- ``optimizer``  exact branch-and-bound optimum for separate-coding allocations
- ``converse``   storage lower bounds and the auxiliary-tuple bijection lab
- ``sim``        time-slotted toy model with delay / erasure channels
- ``cli``        command-line front end (``mvcode --help``)
"""

__version__ = "0.1.0"
