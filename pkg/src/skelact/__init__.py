"""skelact: skeleton-based action recognition driving a tracking UAV sim.

The pipeline stages, in order: depth lifting (``depth``), pose
normalization (``normalize``), per-frame feature embedding and scaling
(``features``), optional latent compression (``autoencoder``), DTW-kNN
classification (``classify``), evaluation (``metrics``/``benchmark``) and
the command bridge plus tracking simulator (``uav``). ``cli`` exposes the
whole chain as subcommands of the ``skelact`` executable.
"""

from .autoencoder import (MLPModel, TrainConfig, encode_sequence,
                          identity_model, load_model, save_model, train_codec)
from .benchmark import embed_query, fit_pipeline, run_benchmark
from .bundle import PipelineBundle, load_bundle, save_bundle
from .classify import (NULL_ACTION, ClassificationResult, ClassifierConfig,
                       ReferenceSet, calibrate_reject_threshold, classify,
                       cross_validate_k, shortlist)
from .config import PRESETS, PipelineConfig
from .depth import (LiftConfig, RawFrame, estimate_subject_distance,
                    first_quartile_mean, lift_frame, read_raw_stream,
                    window_size_px, write_raw_stream)
from .dtw import dtw_distance
from .errors import SkelactError
from .features import (EmbeddingConfig, FeatureSequence, ScalingStats,
                       apply_scaling, embed_frame, embed_sequence,
                       fit_scaling, layout_manifest)
from .landmarks import ALL_PAIRS, DEFAULT_TRIPLES, NUM_LANDMARKS, LandmarkId
from .metrics import (EvalReport, write_confusion_csv, write_report_csv,
                      write_report_json)
from .normalize import NormalizeConfig, normalize_pose, normalize_sequence
from .skeleton_io import (DatasetManifest, PoseSequence, Skeleton3D,
                          convert_mhad_dataset, load_manifest, load_sequence,
                          split, write_manifest, write_sequence)
from .stream import GapSegmenter, StreamConfig, run_stream
from .synthetic import GESTURE_CLASSES, make_dataset, make_sequence
from .uav import (DEFAULT_COMMAND_TABLE, SYNTHETIC_COMMAND_TABLE, Command,
                  CommandDispatcher, SimState, load_scenario, run_scenario,
                  track_step, write_log)

__version__ = "0.1.0"
