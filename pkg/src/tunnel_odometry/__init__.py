"""Quality-gated optical-flow odometry with velocity prediction through dropouts."""

from .flow_odometry import DisplacementStep, Source, displacement_increment, velocity_from_flow
from .pipeline import DisplacementReport, OdometryState, StreamError, process_sample, run_baseline, run_stream
from .range_model import RangeCalibration, calibrate_range
from .sensor_types import (
    Aggregation,
    FlowSample,
    LogFormatError,
    LogRecord,
    OdometryConfig,
    RangeSample,
    format_log_record,
    parse_log_record,
    read_log,
    write_log,
)
from .simulator import MotionProfile, ScenarioPreset, Simulation, builtin_presets, simulate
from .velocity_predictor import (
    GoodSampleWindow,
    NoHistoryError,
    back_fit_accelerations,
    horizon_guard,
    predict_velocity,
    record_good_sample,
)

__version__ = "0.1.0"
