"""Learning algorithms: enumeration, the trajectory reduction, and state merging."""
