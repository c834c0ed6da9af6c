#include "atraj/nlls.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace atraj {

ParameterBlock ParameterBlock::euclidean(const Eigen::VectorXd& v, bool frozen) {
    return {BlockKind::Euclidean, v, frozen};
}

ParameterBlock ParameterBlock::euclidean(std::initializer_list<double> v, bool frozen) {
    Eigen::VectorXd vec(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) {
        vec[i++] = x;
    }
    return {BlockKind::Euclidean, vec, frozen};
}

ParameterBlock ParameterBlock::quaternion(const UnitQuaternion& q, bool frozen) {
    const UnitQuaternion n = q.normalized();
    Eigen::VectorXd v(4);
    v << n.w, n.x, n.y, n.z;
    return {BlockKind::UnitQuaternion, v, frozen};
}

UnitQuaternion ParameterBlock::as_quaternion() const {
    if (kind != BlockKind::UnitQuaternion || values.size() != 4) {
        throw InvalidInputError("block does not hold a quaternion");
    }
    return {values[0], values[1], values[2], values[3]};
}

int NllsProblem::tangent_size() const {
    int n = 0;
    for (const ParameterBlock& b : blocks) {
        n += b.tangent_size();
    }
    return n;
}

void apply_tangent_step(std::vector<ParameterBlock>& blocks, const Eigen::VectorXd& delta) {
    Eigen::Index offset = 0;
    for (ParameterBlock& block : blocks) {
        const int n = block.tangent_size();
        if (block.kind == BlockKind::UnitQuaternion) {
            const Vec3 rv = delta.segment<3>(offset);
            const UnitQuaternion q =
                UnitQuaternion::exp_map(rv).compose(block.as_quaternion()).normalized();
            block.values[0] = q.w;
            block.values[1] = q.x;
            block.values[2] = q.y;
            block.values[3] = q.z;
        } else {
            block.values += delta.segment(offset, n);
        }
        offset += n;
    }
}

namespace {

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
    return m.allFinite();
}

struct FreeLayout {
    std::vector<Eigen::Index> full_offsets;   // tangent offset of each free block
    std::vector<Eigen::Index> block_indices;  // index into problem.blocks
    std::vector<int> sizes;
    Eigen::Index total = 0;
};

FreeLayout free_layout(const std::vector<ParameterBlock>& blocks) {
    FreeLayout layout;
    Eigen::Index offset = 0;
    for (size_t i = 0; i < blocks.size(); ++i) {
        const int n = blocks[i].tangent_size();
        if (!blocks[i].frozen) {
            layout.full_offsets.push_back(offset);
            layout.block_indices.push_back(static_cast<Eigen::Index>(i));
            layout.sizes.push_back(n);
            layout.total += n;
        }
        offset += n;
    }
    return layout;
}

Eigen::VectorXd expand_free_step(const FreeLayout& layout, Eigen::Index full_size,
                                 const Eigen::VectorXd& free_delta) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(full_size);
    Eigen::Index pos = 0;
    for (size_t i = 0; i < layout.full_offsets.size(); ++i) {
        full.segment(layout.full_offsets[i], layout.sizes[i]) =
            free_delta.segment(pos, layout.sizes[i]);
        pos += layout.sizes[i];
    }
    return full;
}

double free_values_norm(const std::vector<ParameterBlock>& blocks) {
    double sq = 0.0;
    for (const ParameterBlock& b : blocks) {
        if (!b.frozen) {
            sq += b.values.squaredNorm();
        }
    }
    return std::sqrt(sq);
}

}  // namespace

std::string to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::GradientTol: return "gradient_tol";
        case TerminationReason::StepTol: return "step_tol";
        case TerminationReason::CostTol: return "cost_tol";
        case TerminationReason::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

SolveReport solve_nlls(NllsProblem& problem, const SolveOptions& options) {
    if (!problem.residual || !problem.jacobian) {
        throw InvalidInputError("problem requires residual and jacobian evaluators");
    }
    const Eigen::Index full_size = problem.tangent_size();
    const FreeLayout layout = free_layout(problem.blocks);

    Eigen::VectorXd r = problem.residual(problem.blocks);
    if (!all_finite(r)) {
        throw InvalidStartError("residual not finite at the starting point");
    }
    double cost = 0.5 * r.squaredNorm();

    SolveReport report;
    report.initial_cost = cost;
    report.final_cost = cost;

    if (layout.total == 0) {
        report.converged = true;
        report.termination_reason = TerminationReason::GradientTol;
        return report;
    }

    double damping = options.initial_damping;
    bool first_jacobian = true;

    for (int outer = 0; outer < options.max_iterations; ++outer) {
        const Eigen::MatrixXd j_full = problem.jacobian(problem.blocks);
        if (!all_finite(j_full)) {
            if (first_jacobian) {
                throw InvalidStartError("jacobian not finite at the starting point");
            }
            throw Error("jacobian not finite at an accepted iterate");
        }
        first_jacobian = false;
        if (j_full.rows() != r.size() || j_full.cols() != full_size) {
            throw InvalidInputError("jacobian dimensions do not match residual/blocks");
        }

        // Gather free columns.
        Eigen::MatrixXd j(r.size(), layout.total);
        Eigen::Index pos = 0;
        for (size_t i = 0; i < layout.full_offsets.size(); ++i) {
            j.middleCols(pos, layout.sizes[i]) =
                j_full.middleCols(layout.full_offsets[i], layout.sizes[i]);
            pos += layout.sizes[i];
        }

        const Eigen::VectorXd gradient = j.transpose() * r;
        if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
            report.converged = true;
            report.termination_reason = TerminationReason::GradientTol;
            break;
        }

        const Eigen::MatrixXd hessian = j.transpose() * j;

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd damped = hessian;
            damped.diagonal().array() += damping;
            const Eigen::VectorXd delta = damped.ldlt().solve(-gradient);

            if (!all_finite(delta)) {
                damping *= options.damping_up;
                if (damping > options.max_damping) {
                    throw SolverStalledError("damping exceeded ceiling without progress");
                }
                continue;
            }

            const double x_norm = free_values_norm(problem.blocks);
            if (delta.norm() < options.step_tol * (x_norm + options.step_tol)) {
                report.converged = true;
                report.termination_reason = TerminationReason::StepTol;
                break;
            }

            std::vector<ParameterBlock> candidate = problem.blocks;
            apply_tangent_step(candidate, expand_free_step(layout, full_size, delta));
            const Eigen::VectorXd r_new = problem.residual(candidate);
            const double cost_new = all_finite(r_new)
                                        ? 0.5 * r_new.squaredNorm()
                                        : std::numeric_limits<double>::infinity();

            if (cost_new < cost) {
                problem.blocks = std::move(candidate);
                const double drop = cost - cost_new;
                r = r_new;
                cost = cost_new;
                report.iterations += 1;
                damping = std::max(damping * options.damping_down, 1e-12);
                accepted = true;
                if (drop < options.cost_tol * std::max(cost, 1e-300)) {
                    report.converged = true;
                    report.termination_reason = TerminationReason::CostTol;
                }
            } else {
                damping *= options.damping_up;
                if (damping > options.max_damping) {
                    throw SolverStalledError("damping exceeded ceiling without progress");
                }
            }
        }
        if (report.converged) {
            break;
        }
    }

    report.final_cost = cost;
    if (!report.converged) {
        report.termination_reason = TerminationReason::MaxIterations;
    }
    return report;
}

Eigen::MatrixXd numeric_jacobian(const NllsProblem& problem, double step) {
    if (!problem.residual) {
        throw InvalidInputError("problem requires a residual evaluator");
    }
    const Eigen::Index full_size = problem.tangent_size();
    const Eigen::VectorXd r0 = problem.residual(problem.blocks);
    Eigen::MatrixXd jac(r0.size(), full_size);
    for (Eigen::Index col = 0; col < full_size; ++col) {
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(full_size);
        delta[col] = step;
        std::vector<ParameterBlock> plus = problem.blocks;
        apply_tangent_step(plus, delta);
        delta[col] = -step;
        std::vector<ParameterBlock> minus = problem.blocks;
        apply_tangent_step(minus, delta);
        jac.col(col) = (problem.residual(plus) - problem.residual(minus)) / (2.0 * step);
    }
    return jac;
}

}  // namespace atraj
