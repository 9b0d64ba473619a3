//! Cell-local state and the pure, message-driven step logic.
//!
//! A cell never sees its own coordinates. Everything it does in a time-step
//! is a function of the incoming bus messages and its four local registers;
//! the actuator id carried by each message selects the register pair and the
//! broadcast bus family.

use crate::scalar::Scalar;

/// The three streaming actuators, named by the face they drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActuatorId {
    /// Streams the mode-1 matrix; second to run.
    Horizontal,
    /// Streams the mode-2 matrix; last to run.
    Frontal,
    /// Streams the mode-3 matrix; runs first and starts the transform.
    Lateral,
}

impl ActuatorId {
    pub fn id(self) -> u8 {
        match self {
            ActuatorId::Horizontal => 1,
            ActuatorId::Frontal => 2,
            ActuatorId::Lateral => 3,
        }
    }

    /// Stage driven by this actuator, in hand-off order.
    pub fn stage(self) -> u8 {
        match self {
            ActuatorId::Lateral => 1,
            ActuatorId::Horizontal => 2,
            ActuatorId::Frontal => 3,
        }
    }

    pub fn input_register(self) -> RegId {
        match self {
            ActuatorId::Lateral => RegId::X,
            ActuatorId::Horizontal => RegId::Xd,
            ActuatorId::Frontal => RegId::Xdd,
        }
    }

    pub fn output_register(self) -> RegId {
        match self {
            ActuatorId::Lateral => RegId::Xd,
            ActuatorId::Horizontal => RegId::Xdd,
            ActuatorId::Frontal => RegId::Xddd,
        }
    }

    /// Bus family pivot cells broadcast on for this actuator's stage.
    pub fn broadcast_family(self) -> BusFamily {
        match self {
            ActuatorId::Lateral => BusFamily::Horizontal,
            ActuatorId::Horizontal => BusFamily::Lateral,
            ActuatorId::Frontal => BusFamily::Frontal,
        }
    }
}

/// The three crossover bus families. A cell sits on exactly one bus of each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BusFamily {
    /// Fixed (i1, i2), spanning i3.
    Horizontal,
    /// Fixed (i2, i3), spanning i1.
    Lateral,
    /// Fixed (i1, i3), spanning i2.
    Frontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegId {
    X,
    Xd,
    Xdd,
    Xddd,
}

/// One coefficient element as delivered on a bus.
#[derive(Debug, Clone, Copy)]
pub struct BusMessage {
    pub value: Scalar,
    pub tag: bool,
    pub actuator: ActuatorId,
}

/// Zero test used for skip decisions. `Disabled` makes the machine behave
/// as a dense reference: everything is sent and every multiply-add runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroPolicy {
    Exact,
    /// Treat |x| <= epsilon as zero; marks the run lossy.
    Epsilon(f64),
    Disabled,
}

impl ZeroPolicy {
    pub fn is_zero(&self, s: Scalar) -> bool {
        match self {
            ZeroPolicy::Exact => s.is_exact_zero(),
            ZeroPolicy::Epsilon(e) => s.magnitude() <= *e,
            ZeroPolicy::Disabled => false,
        }
    }

    pub fn lossy(&self) -> bool {
        matches!(self, ZeroPolicy::Epsilon(_))
    }
}

#[derive(Debug, Clone)]
pub struct CellRegisters {
    pub x: Scalar,
    pub xd: Scalar,
    pub xdd: Scalar,
    pub xddd: Scalar,
    pub waiting: bool,
}

impl CellRegisters {
    pub fn new(zero: Scalar) -> Self {
        CellRegisters { x: zero, xd: zero, xdd: zero, xddd: zero, waiting: false }
    }

    pub fn get(&self, reg: RegId) -> Scalar {
        match reg {
            RegId::X => self.x,
            RegId::Xd => self.xd,
            RegId::Xdd => self.xdd,
            RegId::Xddd => self.xddd,
        }
    }

    pub fn set(&mut self, reg: RegId, value: Scalar) {
        match reg {
            RegId::X => self.x = value,
            RegId::Xd => self.xd = value,
            RegId::Xdd => self.xdd = value,
            RegId::Xddd => self.xddd = value,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellCounters {
    pub macs: u64,
    pub skips: u64,
    pub sends: u64,
    pub receives: u64,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub regs: CellRegisters,
    pub counters: CellCounters,
}

impl Cell {
    pub fn new(zero: Scalar) -> Self {
        Cell { regs: CellRegisters::new(zero), counters: CellCounters::default() }
    }
}

/// Pivot-phase response: a cell that received the tagged element reads the
/// stage-input register and offers it for broadcast unless it is zero.
pub fn pivot_broadcast(regs: &CellRegisters, msg: &BusMessage, zero: &ZeroPolicy) -> Option<Scalar> {
    debug_assert!(msg.tag, "pivot phase runs only on tagged cells");
    let value = regs.get(msg.actuator.input_register());
    if zero.is_zero(value) {
        None
    } else {
        Some(value)
    }
}

/// What one cell did in the compute phase of one time-step.
#[derive(Debug, Clone, Default)]
pub struct ComputeOutcome {
    /// The multiply result to fold into the stage output, if any.
    pub contribution: Option<Scalar>,
    pub waiting: bool,
    pub receives: u64,
}

/// Compute-phase response. The operand is the cell's own stage-input
/// register when the message is tagged, otherwise whatever arrived on the
/// broadcast bus. A multiply-add happens only when both a usable coefficient
/// and an operand are present.
pub fn cell_compute(
    regs: &CellRegisters,
    msg: Option<&BusMessage>,
    bus_operand: Option<Scalar>,
    zero: &ZeroPolicy,
) -> ComputeOutcome {
    let Some(msg) = msg else {
        // no coefficient arrived; any prior waiting state persists
        return ComputeOutcome {
            contribution: None,
            waiting: regs.waiting,
            receives: bus_operand.is_some() as u64,
        };
    };

    let mut receives = 1;
    let operand = if msg.tag {
        let own = regs.get(msg.actuator.input_register());
        if zero.is_zero(own) {
            None
        } else {
            Some(own)
        }
    } else {
        if bus_operand.is_some() {
            receives += 1;
        }
        bus_operand
    };

    match operand {
        Some(op) if !zero.is_zero(msg.value) => ComputeOutcome {
            contribution: Some(op * msg.value),
            waiting: false,
            receives,
        },
        Some(_) => ComputeOutcome { contribution: None, waiting: false, receives },
        None => ComputeOutcome { contribution: None, waiting: true, receives },
    }
}
