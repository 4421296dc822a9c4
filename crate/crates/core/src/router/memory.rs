//! Shared write-once cache of node outputs.

use std::collections::BTreeMap;
use std::sync::Mutex;

use thiserror::Error;

use super::plan::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("memory key `{0}` was already written")]
pub struct AlreadyWritten(pub String);

#[derive(Debug, Default)]
pub struct MemoryStore {
    entries: Mutex<BTreeMap<String, String>>,
}

pub fn result_key(node: &NodeId) -> String {
    format!("result_{node}")
}

impl MemoryStore {
    pub fn new() -> Self {
        MemoryStore::default()
    }

    pub fn write(&self, node: &NodeId, value: String) -> Result<(), AlreadyWritten> {
        let key = result_key(node);
        let mut map = self.entries.lock().unwrap_or_else(|e| e.into_inner());
        if map.contains_key(&key) {
            return Err(AlreadyWritten(key));
        }
        map.insert(key, value);
        Ok(())
    }

    pub fn read(&self, node: &NodeId) -> Option<String> {
        self.entries.lock().unwrap_or_else(|e| e.into_inner()).get(&result_key(node)).cloned()
    }

    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.entries.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn write_once() {
        let m = MemoryStore::new();
        let n = NodeId::new("ques_1");
        m.write(&n, "a".into()).unwrap();
        assert_eq!(m.write(&n, "b".into()), Err(AlreadyWritten("result_ques_1".into())));
        assert_eq!(m.read(&n).as_deref(), Some("a"));
        assert_eq!(m.snapshot().len(), 1);
    }
}
