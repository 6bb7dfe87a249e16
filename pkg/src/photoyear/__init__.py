"""photoyear: a self-hostable game where players date historical photographs.

Players either guess a single photo's year or pick the older of two photos;
the package bundles the scoring rules, catalog tooling, game engine, storage,
analytics, and a JSON HTTP service.
"""

__version__ = "0.1.0"
