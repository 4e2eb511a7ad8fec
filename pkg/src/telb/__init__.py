"""Two-particle pilot-wave dynamics and its exclusively-local reformulation.

The package has three layers:

* an oracle: the full two-particle Schrödinger equation on a periodic grid
  (``configspace``) plus de Broglie-Bohm guidance for the particle pair
  (``pilotwave``);
* the local-field reformulation: conditional wave functions and their
  derivative-field hierarchies, in raw (``hierarchy``) and subtracted
  (``barred``) form, which evolve per particle and close on local data;
* harnesses that check the two against each other (``experiments``,
  ``residuals``) and a small CLI (``telb.cli``).
"""

__version__ = "0.1.0"
