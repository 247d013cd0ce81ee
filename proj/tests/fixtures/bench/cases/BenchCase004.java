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

public class BenchCase004 extends HttpServlet {
    private Connection connection;

    @Override
    public void doGet(HttpServletRequest request, HttpServletResponse response)
            throws ServletException, IOException {
        String[] ids = request.getParameterValues("id");
        String joined = String.join(",", ids);
        try {
            Statement statement = connection.createStatement();
            statement.execute("DELETE FROM sessions WHERE id IN (" + joined + ")");
            response.getWriter().println("deleted");
        } catch (SQLException e) {
            throw new ServletException(e);
        }
    }
}
