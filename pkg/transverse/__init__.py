# Transverse Invariant Engines Package
