//! File formats. Every command-line tool exchanges data exclusively through
//! these readers and writers.

pub mod events;
pub mod frames;
pub mod tracks;

pub use events::{read_events, write_events};
pub use frames::{read_frames, write_frames, Frame, FrameSequence};
pub use tracks::{
    read_boxes, read_detections, read_embeddings, read_landmarks, read_poses, write_boxes,
    write_detections, write_embeddings, write_landmarks, write_poses, BoxKeyframe, Detection,
    DetectionFrame, DetectionTrack, Embedding, EmbeddingTrack, LandmarkTrack, Landmarks, Pose,
    PoseTrack,
};
