# Value iteration solvers
