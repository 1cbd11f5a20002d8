#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use snakebox::Graph;

pub const HYBRID_SNAKE_5: &str =
    "10100,00100,00101,01101,01111,11111,10111,10011,00011,00010,01010,11010,11000,11001";
pub const SIMULATED_SNAKE_5: &str =
    "11001,10001,10000,10100,00100,01100,01000,01010,01011,00011,00111,10111,11111,11110";
pub const QPU_SNAKE_3: &str = "010,000,100,101,111";
pub const HYBRID_COIL_5: &str =
    "00101,00111,10111,11111,11101,11100,10100,10000,10010,11010,01010,01011,01001,00001";
pub const SIMULATED_COIL_5: &str =
    "10111,10110,00110,00100,01100,01000,11000,10000,10001,00001,00011,01011,11011,11111";
pub const QPU_COIL_2: &str = "11,01,00,10";

/// Erdős–Rényi graph with edge probability 1/2.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_snakebox")
}
