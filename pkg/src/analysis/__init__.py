"""Semiconcavity probes and distance scans"""

try:
    from .probes import (
        ProbeError, ProbePoint, ProbeReport, admissible_cusp_pair, combined_tolerance,
        engel_horizontal_probe, engel_vertical_probe, free_vertical_cusp_probe,
        horizontal_semiconcavity_probe, martinet_horizontal_probe, martinet_probes,
        martinet_vertical_probe, second_difference, vertical_cusp_probe
    )
    from .scan import DistanceSection, distance_section
except ImportError:
    from src.analysis.probes import (
        ProbeError, ProbePoint, ProbeReport, admissible_cusp_pair, combined_tolerance,
        engel_horizontal_probe, engel_vertical_probe, free_vertical_cusp_probe,
        horizontal_semiconcavity_probe, martinet_horizontal_probe, martinet_probes,
        martinet_vertical_probe, second_difference, vertical_cusp_probe
    )
    from src.analysis.scan import DistanceSection, distance_section
