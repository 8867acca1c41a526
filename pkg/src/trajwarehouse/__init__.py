"""Semantic trajectories of mobile data collectors and a snowflake warehouse over them."""

from .core import (
    AdminPlace,
    Country,
    Delegation,
    GeoPoint,
    GpsFix,
    MeanOfTransport,
    Mic,
    Move,
    PoiKind,
    PointOfInterest,
    RegionalGovernment,
    Stop,
    StopKind,
    TimeInterval,
    Trajectory,
    TrajectorySection,
    assemble_trajectory,
    duration,
    geo_distance,
)
from .itinerary import (
    Destination,
    ItineraryState,
    NavigationEvent,
    apply_event,
    apply_event_or_skip,
    advance,
    next_destination,
    plan_static,
)
from .query import (
    q1_touristic_places_on_trajectory,
    q2_count_agriculture,
    q3_lakes_on_trajectory,
    q4_trajectories_with_sea_and_touristic,
    q5_hotels,
    q6_trajectories_min_touristic,
    rollup_poi_count,
)
from .segmentation import SegmentationParams, annotate_pois, classify_stop, enrich, segment
from .trajgen import GenParams, NetworkSpec, gen_runs, gen_world
from .warehouse import WarehouseBundle, integrity_check, load, read_bundle, write_bundle

__version__ = "0.1.0"
