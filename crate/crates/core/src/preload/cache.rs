use std::collections::BTreeMap;

use crate::terrain::{NodeId, TerrainTree};

pub const DEFAULT_EVICTION_FRAMES: u64 = 120;

/// Nodes resident on the computation server plus transfer accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct PreloadCache {
    /// Resident node -> last frame it was selected.
    loaded: BTreeMap<NodeId, u64>,
    pub bytes_this_frame: u64,
    pub bytes_total: u64,
    pub frame_index: u64,
    eviction_frames: u64,
}

impl Default for PreloadCache {
    fn default() -> Self {
        Self::new(DEFAULT_EVICTION_FRAMES)
    }
}

impl PreloadCache {
    /// A node is dropped on the `eviction_frames`-th consecutive frame in
    /// which it is not selected.
    pub fn new(eviction_frames: u64) -> Self {
        Self {
            loaded: BTreeMap::new(),
            bytes_this_frame: 0,
            bytes_total: 0,
            frame_index: 0,
            eviction_frames: eviction_frames.max(1),
        }
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.loaded.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.loaded.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loaded.is_empty()
    }

    pub fn loaded(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.loaded.keys().copied()
    }

    /// Advances one frame: charges every selected node that is not resident,
    /// marks the selection as used and evicts stale nodes. Returns the bytes
    /// moved this frame.
    pub fn step(&mut self, tree: &TerrainTree, selected: &[NodeId]) -> u64 {
        self.frame_index += 1;
        let frame = self.frame_index;
        let mut bytes = 0;
        for &id in selected {
            if self.loaded.insert(id, frame).is_none() {
                bytes += tree.node(id).data_size;
            }
        }
        let horizon = self.eviction_frames;
        self.loaded.retain(|_, last| frame - *last < horizon);
        self.bytes_this_frame = bytes;
        self.bytes_total += bytes;
        bytes
    }
}
