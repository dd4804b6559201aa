//! Environment served by a child process over line-delimited JSON.
//!
//! Requests and replies are one JSON object per line:
//!
//! ```text
//! {"cmd":"reset","seed":7}            -> {"obs":[24 numbers]}
//! {"cmd":"step","actions":[3,0,19,9]} -> {"obs":[24 numbers],"metric":1.5,"done":false}
//! {"cmd":"close"}
//! ```

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::TASK_ACTIONS;

use super::{Environment, Observation, Transition, OBS_LEN};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSpec {
    /// Program followed by its arguments.
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl ExternalSpec {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            timeout: Duration::from_secs(10),
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "cmd", rename_all = "lowercase")]
enum Request<'a> {
    Reset { seed: u64 },
    Step { actions: &'a [u8] },
    Close,
}

#[derive(Deserialize)]
struct ResetReply {
    obs: Vec<f64>,
}

#[derive(Deserialize)]
struct StepReply {
    obs: Vec<f64>,
    metric: f64,
    done: bool,
}

#[derive(Debug)]
pub struct ExternalEnv {
    program: String,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ExternalEnv {
    pub fn spawn(spec: &ExternalSpec) -> Result<Self> {
        let (program, args) = spec
            .command
            .split_first()
            .ok_or_else(|| Error::Environment("empty environment command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Environment(format!("cannot start `{program}`: {e}")))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            program: program.clone(),
            child,
            stdin,
            lines: rx,
            timeout: spec.timeout,
        })
    }

    fn fault(&self, what: impl std::fmt::Display) -> Error {
        Error::Environment(format!("`{}`: {what}", self.program))
    }

    fn send(&mut self, request: &Request<'_>) -> Result<()> {
        let mut line = serde_json::to_string(request)?;
        line.push('\n');
        let stdin = self.stdin.as_mut().ok_or_else(|| Error::Environment("session closed".into()))?;
        stdin
            .write_all(line.as_bytes())
            .and_then(|_| stdin.flush())
            .map_err(|e| self.fault(format!("write failed: {e}")))
    }

    fn receive<T: serde::de::DeserializeOwned>(&mut self) -> Result<T> {
        let line = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(self.fault(format!("read failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(self.fault(format!("no reply within {:?}", self.timeout)));
            }
            Err(RecvTimeoutError::Disconnected) => return Err(self.fault("process exited")),
        };
        serde_json::from_str(&line).map_err(|e| self.fault(format!("malformed reply `{}`: {e}", line.trim())))
    }

    fn check_obs(&self, obs: &[f64]) -> Result<Observation> {
        let obs: Observation = obs
            .try_into()
            .map_err(|_| self.fault(format!("observation has {} entries, expected {OBS_LEN}", obs.len())))?;
        if !obs.iter().all(|v| v.is_finite()) {
            return Err(self.fault("observation is not finite"));
        }
        Ok(obs)
    }
}

impl Environment for ExternalEnv {
    fn reset(&mut self, seed: u64) -> Result<Observation> {
        self.send(&Request::Reset { seed })?;
        let reply: ResetReply = self.receive()?;
        self.check_obs(&reply.obs)
    }

    fn step(&mut self, actions: &[u8; TASK_ACTIONS]) -> Result<Transition> {
        self.send(&Request::Step { actions })?;
        let reply: StepReply = self.receive()?;
        let obs = self.check_obs(&reply.obs)?;
        if !reply.metric.is_finite() {
            return Err(self.fault("metric is not finite"));
        }
        Ok(Transition {
            obs,
            metric: reply.metric,
            done: reply.done,
        })
    }
}

impl Drop for ExternalEnv {
    fn drop(&mut self) {
        if self.stdin.is_some() {
            let _ = self.send(&Request::Close);
        }
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
