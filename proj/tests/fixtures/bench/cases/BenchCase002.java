package org.example.bench;

import java.io.File;
import java.io.FileInputStream;
import java.io.IOException;
import java.io.PrintWriter;
import java.sql.Connection;
import java.sql.PreparedStatement;
import java.sql.ResultSet;
import java.sql.SQLException;
import java.sql.Statement;
import javax.servlet.ServletException;
import javax.servlet.http.HttpServlet;
import javax.servlet.http.HttpServletRequest;
import javax.servlet.http.HttpServletResponse;

public class BenchCase002 extends HttpServlet {
    private Connection connection;

    private String buildFilter(String column, String value) {
        return column + " = '" + value + "'";
    }

    @Override
    public void doGet(HttpServletRequest request, HttpServletResponse response)
            throws ServletException, IOException {
        String city = request.getHeader("X-City");
        String filter = buildFilter("city", city);
        try {
            Statement statement = connection.createStatement();
            int updated = statement.executeUpdate("UPDATE stores SET open = 1 WHERE " + filter);
            response.getWriter().println(updated);
        } catch (SQLException e) {
            throw new ServletException(e);
        }
    }
}
