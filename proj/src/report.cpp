#include "walras/report.hpp"

#include <charconv>
#include <cstdio>
#include <ostream>

namespace walras {

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_equilibria_csv(std::ostream& out, const std::vector<EquilibriumRecord>& records,
                          const std::vector<DeltaColumns>* deltas) {
    const Eigen::Index l = records.empty() ? 0 : records.front().p.goods();
    for (Eigen::Index j = 0; j + 1 < l; ++j) out << "p_" << j + 1 << ',';
    out << "residual,det_j,regular,index";
    if (deltas) out << ",delta,sign_delta,sign_match_index";
    out << '\n';
    for (std::size_t r = 0; r < records.size(); ++r) {
        const EquilibriumRecord& rec = records[r];
        for (Eigen::Index j = 0; j + 1 < rec.p.goods(); ++j) out << format_number(rec.p[j]) << ',';
        out << format_number(rec.residual_norm) << ',' << format_number(rec.det_j) << ','
            << (rec.regular ? "true" : "false") << ',' << rec.index;
        if (deltas) {
            const DeltaColumns& d = (*deltas)[r];
            if (d.result) {
                out << ',' << format_number(d.result->value) << ',' << d.result->sign << ','
                    << (d.result->sign == rec.index ? "true" : "false");
            } else {
                out << ',' << d.error << ",0,false";
            }
        }
        out << '\n';
    }
}

void write_transfer_csv(std::ostream& out, const std::vector<TransferReport>& reports, int goods) {
    out << "donor,magnitude,direction_hash,u_before,u_after,delta_u,paradox";
    for (int j = 0; j + 1 < goods; ++j) out << ",p_after_" << j + 1;
    out << '\n';
    for (const TransferReport& rep : reports) {
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(rep.direction_hash));
        out << rep.donor + 1 << ',' << format_number(rep.magnitude) << ',' << hash << ','
            << format_number(rep.u_donor_before) << ',' << format_number(rep.u_donor_after) << ','
            << format_number(rep.delta_u()) << ',' << (rep.paradox ? "true" : "false");
        for (int j = 0; j + 1 < goods; ++j) out << ',' << format_number(rep.p_after[j]);
        out << '\n';
    }
}

void write_trajectory_tsv(std::ostream& out, const Trajectory& traj) {
    const Eigen::Index dims = traj.points.empty() ? 0 : traj.points.front().price.size();
    out << "time";
    for (Eigen::Index j = 0; j < dims; ++j) out << "\tp_" << j + 1;
    out << "\texcess_inf\n";
    for (const TrajectoryPoint& pt : traj.points) {
        out << format_number(pt.time);
        for (Eigen::Index j = 0; j < dims; ++j) out << '\t' << format_number(pt.price[j]);
        out << '\t' << format_number(pt.excess_norm) << '\n';
    }
}

}  // namespace walras
