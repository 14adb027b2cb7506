"""Counterfactual evaluation of the R157 reference driver models on cut-ins."""

from .base import DriverDecision, NoReaction
from .ccdm import CcdmDriver, CcdmParams, CcdmState, Phase, ccdm_step
from .engine import (AlreadyDecelerating, BatchResult, BrakeActuator, ModifiedScenario,
                     NoOnset, SimulationResult, detect_human_onset, neutralize, run_batch,
                     simulate)
from .fsm import (FsmDriver, FsmParams, FuzzyAssessment, InsufficientHistory, fsm_assess,
                  fsm_command)
from .generator import CutinParams, InvalidParams, generate, generate_suite
from .kinematics import (LaneLayout, OrientedBox, OutOfRange, Trajectory, TrajectorySample,
                         VehicleGeometry, boxes_overlap, interpolate, ldbo_distance,
                         longitudinal_gap, ttc)
from .metrics import (AllZero, EmptyInput, EventMetrics, Histogram, WilcoxonResult,
                      compute_event_metrics, histogram, median, wilcoxon_signed_rank)
from .scenario import (InvariantViolation, ParseError, Scenario, read_scenario,
                       write_scenario)

__version__ = "0.1.0"
