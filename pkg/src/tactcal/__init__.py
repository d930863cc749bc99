"""In-situ calibration of a visuotactile sensor's elastomer from deformation-only measurements.

Subpackages and modules:

- :mod:`tactcal.contact`: forward normal and torsional contact models;
- :mod:`tactcal.calibration`: fitting and closed-form inversion to (E1, nu1);
- :mod:`tactcal.halfspace`: half-space compliance and traction reconstruction;
- :mod:`tactcal.synthlab`: synthetic experiments against the forward models;
- :mod:`tactcal.cli`: the ``tactcal`` command.

All quantities are SI inside the package; files and the CLI use mm, degrees
and MPa.
"""

__version__ = "0.1.0"
