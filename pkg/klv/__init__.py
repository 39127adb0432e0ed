# Core computation module
