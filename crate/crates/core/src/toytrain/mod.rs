//! Small trainable attention predictor with handwritten gradients.

pub mod checkpoint;
pub mod gradcheck;
pub mod layers;
pub mod loss;
pub mod net;
pub mod optim;
pub mod readout;
pub mod synthetic;
pub mod tensor;
pub mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC};
pub use gradcheck::{check_gradients, random_gradient_check, GradCheck};
pub use loss::{mse, smooth_l1, LossConfig};
pub use net::{TinyNet, TinyNetConfig};
pub use optim::{adamw_step, AdamState, OptimConfig, Schedule};
pub use readout::SoftArgmax;
pub use synthetic::{make_synthetic_task, synthetic_scenes, SyntheticScene};
pub use tensor::Tensor;
pub use train::{
    evaluate, frame_to_chw, predict_commands, predict_maps, train, train_with_eval, Dataset, EpochLog,
    Objective, TrainConfig, TrainLog, TrainOutcome,
};
