#ifndef FLOODOPT_COST_HPP
#define FLOODOPT_COST_HPP

// Present-value whole-life cost of an intervention: CAPEX plus discounted
// yearly outflows (annual, periodic, one-off and decommissioning items).

#include <cmath>
#include <string>
#include <vector>

#include "floodopt/errors.hpp"

namespace floodopt {

struct AnnualItem {
    double rate = 0.0;     // GBP per unit per year, or per feature when !per_unit
    bool per_unit = true;
};

struct PeriodicItem {
    int period = 1;        // years
    double cost = 0.0;     // GBP per unit, or per feature when !per_unit
    bool per_unit = true;
    bool major = false;               // fires on its own schedule and pre-empts skip_in_major_years items
    bool skip_in_major_years = false;
};

struct OneOffItem {
    int year = 1;
    double cost = 0.0;
    bool per_unit = true;
};

struct CostSchedule {
    std::string unit = "m2";
    double base_rate = 0.0;     // GBP per unit
    double fee_fraction = 0.12;
    std::vector<AnnualItem> annual;
    std::vector<PeriodicItem> periodic;
    std::vector<OneOffItem> oneoff;
    double decommission_fraction = 0.385; // of the base cost, paid in year T
    double discount_rate = 0.035;
    int lifespan = 50;

    void validate() const
    {
        if (!(discount_rate > 0.0 && discount_rate < 1.0))
            throw InputError("discount rate must lie in (0, 1)");
        if (lifespan < 1)
            throw InputError("lifespan must be at least one year");
        auto nonneg = [](double v, const char* what) {
            if (!(v >= 0.0) || !std::isfinite(v))
                throw InputError(std::string(what) + " must be finite and non-negative");
        };
        nonneg(base_rate, "base rate");
        nonneg(fee_fraction, "fee fraction");
        nonneg(decommission_fraction, "decommission fraction");
        for (const auto& a : annual)
            nonneg(a.rate, "annual rate");
        for (const auto& p : periodic) {
            nonneg(p.cost, "periodic cost");
            if (p.period < 1)
                throw InputError("periodic item period must be at least one year");
        }
        for (const auto& o : oneoff) {
            nonneg(o.cost, "one-off cost");
            if (o.year < 1 || o.year > lifespan)
                throw InputError("one-off item year outside the lifespan");
        }
    }

    /// Undiscounted outflow in year t (1-based) for the given quantity.
    double outflow(int t, double quantity) const
    {
        auto scale = [quantity](bool per_unit) { return per_unit ? quantity : 1.0; };
        double c = 0.0;
        for (const auto& a : annual)
            c += a.rate * scale(a.per_unit);
        bool major_year = false;
        for (const auto& p : periodic)
            if (p.major && t % p.period == 0) {
                major_year = true;
                c += p.cost * scale(p.per_unit);
            }
        for (const auto& p : periodic)
            if (!p.major && t % p.period == 0 && !(p.skip_in_major_years && major_year))
                c += p.cost * scale(p.per_unit);
        for (const auto& o : oneoff)
            if (o.year == t)
                c += o.cost * scale(o.per_unit);
        if (t == lifespan)
            c += decommission_fraction * base_rate * quantity;
        return c;
    }

    double capex(double quantity) const { return base_rate * (1.0 + fee_fraction) * quantity; }
};

/// Eq: C = CAPEX + sum_{t=1..T} OPEX_t / (1+r)^t. A zero quantity means the
/// feature is absent, so fixed per-feature items vanish as well.
inline double whole_life_cost(const CostSchedule& s, double quantity)
{
    if (!(quantity >= 0.0) || !std::isfinite(quantity))
        throw InputError("quantity must be finite and non-negative");
    if (quantity == 0.0)
        return 0.0;
    s.validate();
    double total = s.capex(quantity);
    double discount = 1.0;
    for (int t = 1; t <= s.lifespan; ++t) {
        discount /= 1.0 + s.discount_rate;
        total += s.outflow(t, quantity) * discount;
    }
    return total;
}

inline CostSchedule permeable_paving_schedule()
{
    CostSchedule s;
    s.unit = "m2";
    s.base_rate = 90.0;
    s.annual = {{1.50 * 0.15, true}};   // 1.50 GBP/m3 over 0.15 m3 of attenuation per m2
    s.oneoff = {{25, 10.0, true}};
    return s;
}

inline CostSchedule detention_basin_schedule()
{
    CostSchedule s;
    s.unit = "m3";
    s.base_rate = 33.6;
    s.annual = {{1.14, true}};
    s.periodic = {{10, 8400.0, false, true, false}, {3, 840.0, false, false, true}};
    return s;
}

inline CostSchedule rain_garden_schedule()
{
    CostSchedule s;
    s.unit = "m2";
    s.base_rate = 250.0;
    s.annual = {{2.0, true}};
    s.periodic = {{10, 50.0, true, true, false}};
    return s;
}

} // namespace floodopt

#endif
