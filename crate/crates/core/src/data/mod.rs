//! Ingestion and generation of inputs: KITTI labels and calibration, synthetic
//! scenes, height-noise models and the JSON-lines / CSV record formats.

pub mod kitti;
pub mod noise;
pub mod records;
pub mod scene;

pub use kitti::{labels_to_ground_truth, parse_calib, parse_label_file, GroundTruthObject, KittiLabel};
pub use noise::{perturb_heights, perturb_heights_with_rng, NoiseModel};
pub use records::{read_jsonl, write_csv, write_jsonl, RatioRecord, TruthRecord};
pub use scene::{generate_scene, DimsRanges, SceneConfig};
