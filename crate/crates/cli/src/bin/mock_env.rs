//! Scriptable stand-in for an external task environment, speaking the
//! line-delimited JSON protocol on stdin/stdout.
//!
//! Every observation is `--obs` repeated 24 times and every step reports
//! `--metric`. `--exit-after N` exits without replying to the N-th step
//! request, `--done-after N` ends episodes after N steps, and `--garbage`
//! answers steps with a malformed line.

use std::io::{BufRead, Write};

use clap::Parser;
use serde_json::{json, Value};

#[derive(Parser)]
struct Args {
    #[arg(long, default_value_t = 0.5)]
    obs: f64,
    #[arg(long, default_value_t = 1.0)]
    metric: f64,
    #[arg(long)]
    exit_after: Option<u64>,
    #[arg(long)]
    done_after: Option<u64>,
    #[arg(long)]
    garbage: bool,
}

fn main() {
    let args = Args::parse();
    let obs = vec![args.obs; 24];
    let stdin = std::io::stdin();
    let mut out = std::io::stdout().lock();
    let mut steps_total = 0u64;
    let mut steps_episode = 0u64;
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let Ok(req) = serde_json::from_str::<Value>(&line) else {
            eprintln!("mock env: unreadable request {line:?}");
            std::process::exit(2);
        };
        let reply = match req["cmd"].as_str() {
            Some("reset") => {
                steps_episode = 0;
                json!({ "obs": obs })
            }
            Some("step") => {
                steps_total += 1;
                steps_episode += 1;
                if args.exit_after.is_some_and(|n| steps_total >= n) {
                    std::process::exit(0);
                }
                if args.garbage {
                    writeln!(out, "this is not json").unwrap();
                    out.flush().unwrap();
                    continue;
                }
                let done = args.done_after.is_some_and(|n| steps_episode >= n);
                json!({ "obs": obs, "metric": args.metric, "done": done })
            }
            Some("close") => break,
            _ => {
                eprintln!("mock env: unknown request {line:?}");
                std::process::exit(2);
            }
        };
        if writeln!(out, "{reply}").and_then(|_| out.flush()).is_err() {
            break;
        }
    }
}
