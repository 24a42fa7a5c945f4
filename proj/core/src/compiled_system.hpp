#pragma once

#include "fibcon/fiber_lab.hpp"

#include <vector>

namespace fibcon::fiber::detail {

// Programs for the components (Phi..., g), their gradients and Hessians.
struct CompiledSystem {
    std::size_t dim = 0;
    std::vector<expr::Program> value;
    std::vector<std::vector<expr::Program>> gradient;              // [component][axis]
    std::vector<std::vector<std::vector<expr::Program>>> hessian;  // [component][i][j], i <= j filled

    explicit CompiledSystem(const SystemSpec& spec, bool with_hessian = false)
        : dim(spec.dimension())
    {
        for (const auto& c : spec.components()) {
            value.emplace_back(c);
            std::vector<expr::Program> grad;
            std::vector<std::vector<expr::Program>> hess(dim, std::vector<expr::Program>(dim));
            for (std::size_t i = 0; i < dim; ++i) {
                const auto di = expr::differentiate(c, static_cast<int>(i));
                grad.emplace_back(di);
                if (with_hessian)
                    for (std::size_t j = i; j < dim; ++j)
                        hess[i][j] = expr::Program(expr::differentiate(di, static_cast<int>(j)));
            }
            gradient.push_back(std::move(grad));
            hessian.push_back(std::move(hess));
        }
    }

    std::size_t components() const { return value.size(); }
};

} // namespace fibcon::fiber::detail
